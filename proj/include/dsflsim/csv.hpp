#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace dsfl {

// RFC-4180-style CSV writer with a fixed numeric format so identical data
// always serializes to identical bytes.
class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header)
        : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("csv: cannot open " + path);
        row(header);
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << quote(cells[i]);
        }
        out_ << "\r\n";
    }

    static std::string num(double v) {
        if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
        if (std::isnan(v)) return "nan";
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.12g", v);
        return buf;
    }

    static std::string num(long long v) { return std::to_string(v); }
    static std::string num(int v) { return std::to_string(v); }
    static std::string num(std::uint64_t v) { return std::to_string(v); }

  private:
    static std::string quote(const std::string& s) {
        if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) {
            q += c;
            if (c == '"') q += '"';
        }
        q += '"';
        return q;
    }

    std::ofstream out_;
};

}  // namespace dsfl
