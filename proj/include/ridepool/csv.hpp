#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ridepool {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

// Minimal CSV reader for the flat, unquoted files this project uses.
// Lines starting with '#' are treated as comments and skipped.
class CsvReader {
public:
    explicit CsvReader(const std::string& path) : path_(path), in_(path) {
        if (!in_) throw ParseError(path + ": cannot open file");
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            if (line.empty() || line[0] == '#') continue;
            header_ = split_csv_line(line);
            return;
        }
        throw ParseError(path + ": missing header row");
    }

    const std::vector<std::string>& header() const { return header_; }

    int column(const std::string& name) const {
        for (std::size_t i = 0; i < header_.size(); ++i)
            if (header_[i] == name) return static_cast<int>(i);
        throw ParseError(path_ + ": missing column '" + name + "'");
    }

    bool next(std::vector<std::string>& row) {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            if (line.empty() || line[0] == '#') continue;
            row = split_csv_line(line);
            if (row.size() != header_.size())
                throw ParseError(path_ + ":" + std::to_string(line_no_) +
                                 ": expected " + std::to_string(header_.size()) +
                                 " fields, got " + std::to_string(row.size()));
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(path_ + ":" + std::to_string(line_no_) + ": " + msg);
    }

    long line_no() const { return line_no_; }

private:
    std::string path_;
    std::ifstream in_;
    std::vector<std::string> header_;
    long line_no_ = 0;
};

inline double parse_double(const std::string& s, const char* what) {
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw ParseError(std::string("bad ") + what + ": '" + s + "'");
    }
    if (pos != s.size()) throw ParseError(std::string("bad ") + what + ": '" + s + "'");
    return v;
}

inline long long parse_int(const std::string& s, const char* what) {
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &pos);
    } catch (const std::exception&) {
        throw ParseError(std::string("bad ") + what + ": '" + s + "'");
    }
    if (pos != s.size()) throw ParseError(std::string("bad ") + what + ": '" + s + "'");
    return v;
}

// Formats a double so that parsing it back yields the identical bit pattern.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace ridepool
