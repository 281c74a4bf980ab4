// csv.hpp - plain-ascii CSV reading and deterministic writing.
//
// Numbers are written with std::to_chars (shortest representation that
// round-trips), so persisted files reload to bit-identical doubles and two
// runs with the same inputs produce byte-identical output.
#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace llab {

std::string format_double(double x);
std::string format_i64(std::int64_t x);

// Strict parse of a full field; throws std::invalid_argument on junk.
double parse_double(const std::string& s);
std::int64_t parse_i64(const std::string& s);

std::vector<std::string> split_csv_line(const std::string& line);

class CsvWriter {
public:
    // Truncates. Throws std::runtime_error if the file cannot be opened.
    CsvWriter(const std::string& path, const std::string& header);

    void write_row(const std::vector<std::string>& fields);

private:
    std::ofstream out_;
    std::string path_;
};

struct CsvFile {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Column index by name; -1 if absent.
    int column(const std::string& name) const;
};

CsvFile read_csv(const std::string& path);

}  // namespace llab
