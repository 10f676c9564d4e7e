#ifndef RIVEQ_CSV_HPP
#define RIVEQ_CSV_HPP

#include <string>
#include <vector>

namespace riveq {

/// Deterministic CSV writer: fixed %.12g formatting, schema declared in a
/// leading comment together with the delta-convention string.
class CsvWriter {
public:
    CsvWriter(std::string path, std::vector<std::string> columns, std::string convention);

    void row(const std::vector<double>& values);
    void row_mixed(const std::vector<std::string>& values);
    void close(); // flushes; destructor closes too
    ~CsvWriter();

    static std::string format(double x);

private:
    std::string path_;
    std::string buffer_;
    size_t columns_ = 0;
    bool closed_ = false;
};

} // namespace riveq

#endif
