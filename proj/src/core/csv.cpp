// SPDX-License-Identifier: Apache-2.0
#include "actiload/core/csv.hpp"

#include <cstdio>
#include <cstdlib>

namespace actiload::core {

CsvWriter::CsvWriter(const std::string& path) : out_(path), path_(path) {
    if (!out_)
        throw CsvError("cannot open '" + path + "' for writing");
}

void CsvWriter::row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i)
            out_ << ',';
        out_ << fields[i];
    }
    out_ << '\n';
    if (!out_)
        throw CsvError("write failed for '" + path_ + "'");
}

CsvReader::CsvReader(const std::string& path) : in_(path), path_(path) {
    if (!in_)
        throw CsvError("cannot open '" + path + "' for reading");
}

bool CsvReader::next(std::vector<std::string>& fields) {
    std::string raw;
    while (std::getline(in_, raw)) {
        ++line_;
        if (!raw.empty() && raw.back() == '\r')
            raw.pop_back();
        if (raw.empty())
            continue;
        fields.clear();
        std::size_t start = 0;
        while (true) {
            std::size_t comma = raw.find(',', start);
            if (comma == std::string::npos) {
                fields.push_back(raw.substr(start));
                break;
            }
            fields.push_back(raw.substr(start, comma - start));
            start = comma + 1;
        }
        return true;
    }
    return false;
}

std::string format_double(double v) {
    char buf[64];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v)
            return buf;
    }
    return buf;
}

std::string format_fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

std::string file_content_hash(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw CsvError("cannot hash missing file '" + path + "'");
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        std::streamsize n = in.gcount();
        for (std::streamsize i = 0; i < n; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
        if (!in)
            break;
    }
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

} // namespace actiload::core
