#include "riveq/csv.hpp"

#include <cstdio>
#include <fstream>

#include "riveq/errors.hpp"

namespace riveq {

CsvWriter::CsvWriter(std::string path, std::vector<std::string> columns, std::string convention)
    : path_(std::move(path)), columns_(columns.size()) {
    buffer_ += "# schema: ";
    for (size_t i = 0; i < columns.size(); ++i) {
        if (i) buffer_ += ',';
        buffer_ += columns[i];
    }
    buffer_ += "; ";
    buffer_ += convention;
    buffer_ += '\n';
    for (size_t i = 0; i < columns.size(); ++i) {
        if (i) buffer_ += ',';
        buffer_ += columns[i];
    }
    buffer_ += '\n';
}

std::string CsvWriter::format(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != columns_) throw Error("csv: column count mismatch");
    for (size_t i = 0; i < values.size(); ++i) {
        if (i) buffer_ += ',';
        buffer_ += format(values[i]);
    }
    buffer_ += '\n';
}

void CsvWriter::row_mixed(const std::vector<std::string>& values) {
    if (values.size() != columns_) throw Error("csv: column count mismatch");
    for (size_t i = 0; i < values.size(); ++i) {
        if (i) buffer_ += ',';
        buffer_ += values[i];
    }
    buffer_ += '\n';
}

void CsvWriter::close() {
    if (closed_) return;
    std::ofstream f(path_, std::ios::binary);
    if (!f) throw Error("csv: cannot open " + path_ + " for writing");
    f << buffer_;
    closed_ = true;
}

CsvWriter::~CsvWriter() {
    try {
        close();
    } catch (...) {
        // destructor must not throw
    }
}

} // namespace riveq
