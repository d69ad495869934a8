#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "ratchet/dnp_profile.hpp"
#include "ratchet/error.hpp"

namespace ratchet::io {

/// Shortest round-trip-stable text for the CSV outputs (12 significant digits).
inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(std::vector<std::string> cells) {
    require(cells.size() == header_.size(), ErrorCode::InvalidParams, "CSV row width mismatch");
    rows_.push_back(std::move(cells));
  }

  void add_numbers(std::initializer_list<double> values) {
    std::vector<std::string> cells;
    for (double v : values) cells.push_back(format_number(v));
    add_row(std::move(cells));
  }

  std::size_t rows() const noexcept { return rows_.size(); }

  std::string str() const {
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
      }
      out += '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return out;
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::IoError, "cannot open " + path.string());
  out << text;
  require(static_cast<bool>(out), ErrorCode::IoError, "failed writing " + path.string());
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Two-column profile file with header "omega_r_hz,signal" (any second column name).
inline DnpProfile read_profile_csv(const std::filesystem::path& path, ProfileMeta meta) {
  std::istringstream in(read_text(path));
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::IoError,
          path.string() + " is empty");
  require(line.rfind("omega_r_hz,", 0) == 0, ErrorCode::IoError,
          path.string() + ": first column must be omega_r_hz");
  std::vector<double> w, s;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    require(comma != std::string::npos, ErrorCode::IoError, "malformed row in " + path.string());
    try {
      w.push_back(std::stod(line.substr(0, comma)));
      s.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw Error(ErrorCode::IoError, "non-numeric row in " + path.string());
    }
  }
  return DnpProfile(std::move(w), std::move(s), meta);
}

}  // namespace ratchet::io
