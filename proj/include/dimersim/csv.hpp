#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "dimersim/errors.hpp"

namespace dimersim::csv {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Deterministic CSV writer: fixed column order, %.17g numbers, '\n' line
// endings, no timestamps. Byte-identical output for identical inputs.
class Writer {
public:
    Writer(const std::string& path, const std::string& tool_version,
           const std::string& resolved_config, std::uint64_t master_seed)
        : out_(path, std::ios::binary) {
        if (!out_) throw config_error("cannot open output file: " + path);
        out_ << "# dimersim " << tool_version << "\n";
        out_ << "# config: " << resolved_config << "\n";
        out_ << "# master_seed: " << master_seed << "\n";
    }

    void header(const std::vector<std::string>& columns) {
        for (std::size_t i = 0; i < columns.size(); ++i)
            out_ << (i ? "," : "") << columns[i];
        out_ << "\n";
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            out_ << (i ? "," : "") << cells[i];
        out_ << "\n";
    }

private:
    std::ofstream out_;
};

} // namespace dimersim::csv
