// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace actiload::core {

struct CsvError : std::runtime_error {
    explicit CsvError(const std::string& msg) : std::runtime_error(msg) {}
};

// Minimal CSV I/O. Fields are written verbatim; none of the project's file
// formats put commas, quotes or newlines inside fields.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path);

    void row(const std::vector<std::string>& fields);
    const std::string& path() const { return path_; }

private:
    std::ofstream out_;
    std::string path_;
};

class CsvReader {
public:
    explicit CsvReader(const std::string& path);

    // Returns false at end of file; skips blank lines.
    bool next(std::vector<std::string>& fields);
    int line() const { return line_; }
    const std::string& path() const { return path_; }

private:
    std::ifstream in_;
    std::string path_;
    int line_ = 0;
};

// Shortest representation that parses back to the same double.
std::string format_double(double v);
std::string format_fixed(double v, int decimals);

// 64-bit FNV-1a over a file's bytes, hex encoded; used for run manifests.
std::string file_content_hash(const std::string& path);

} // namespace actiload::core
