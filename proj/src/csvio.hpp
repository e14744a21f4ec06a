#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "common.hpp"

namespace mfg {

// Fixed 12-digit scientific rendering shared by every CSV writer so output
// is byte-stable across platforms and runs.
inline std::string sci12(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

// Minimal CSV emitter: comma separators, LF endings, header row first.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header)
      : out_(path, std::ios::binary) {
    if (!out_) throw ConfigError("cannot open for writing: " + path);
    for (size_t i = 0; i < header.size(); ++i) {
      if (i) out_ << ',';
      out_ << header[i];
    }
    out_ << '\n';
  }

  void row(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

  void close() { out_.close(); }

 private:
  std::ofstream out_;
};

}  // namespace mfg
