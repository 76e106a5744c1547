#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "vring/errors.hpp"

namespace vring::csv {

/// Shortest round-trip decimal representation; deterministic for a fixed
/// binary, which is what the byte-identical-output contract needs.
inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

class Writer {
  public:
    Writer(const std::string& path, const std::vector<std::string>& header)
        : out_(path, std::ios::binary), ncols_(header.size()) {
        if (!out_)
            throw ConfigError("csv: cannot open " + path + " for writing");
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (i)
                out_ << ',';
            out_ << header[i];
        }
        out_ << '\n';
    }

    void row(const std::vector<std::string>& cells) {
        if (cells.size() != ncols_)
            throw ConfigError("csv: row width mismatch");
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i)
                out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

  private:
    std::ofstream out_;
    std::size_t ncols_;
};

/// Minimal reader for the files this project writes (no quoting needed).
std::vector<std::vector<std::string>> read(const std::string& path);

} // namespace vring::csv
