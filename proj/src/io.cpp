#include "ri/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "ri/common.hpp"

namespace ri {

void atomic_write(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("atomic_write: cannot open " + tmp);
        out.write(content.data(), std::streamsize(content.size()));
        if (!out) throw Error("atomic_write: short write to " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw Error("atomic_write: rename failed for " + path);
    }
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

CsvBuilder::CsvBuilder(std::vector<std::string> header) : n_cols_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out_ += ',';
        out_ += header[i];
    }
    out_ += '\n';
}

void CsvBuilder::add_row(const std::vector<std::string>& cells) {
    if (cells.size() != n_cols_) throw Error("CsvBuilder: row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ += ',';
        out_ += cells[i];
    }
    out_ += '\n';
}

}  // namespace ri
