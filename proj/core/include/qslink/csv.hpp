#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace qslink {

// Deterministic CSV emission: fixed column order, '.' decimal separator,
// %.17g doubles (round-trip exact, byte-stable across runs).
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path); // throws config_error on open failure
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void row(const std::vector<std::string>& cells);

    static std::string num(double v);
    static std::string num(std::int64_t v);
    static std::string num(int v);
    static std::string text(const std::string& s); // RFC-4180 quoting when needed

private:
    std::ofstream out_;
};

} // namespace qslink
