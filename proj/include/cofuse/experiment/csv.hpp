#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "cofuse/core/error.hpp"

namespace cofuse::experiment {

/// Minimal reader for the comma-separated files this library writes (no quoting).
class CsvTable {
public:
    static CsvTable read(const std::filesystem::path& path) {
        std::ifstream f(path, std::ios::binary);
        if (!f) throw ConfigError("missing file " + path.string());
        CsvTable t;
        t.source_ = path.string();
        std::string line;
        if (!std::getline(f, line)) throw ParseError(t.source_, "empty file");
        t.header_ = split(line);
        while (std::getline(f, line)) {
            if (line.empty()) continue;
            auto row = split(line);
            if (row.size() != t.header_.size())
                throw ParseError(t.source_ + ":" + std::to_string(t.rows_.size() + 2), "wrong column count");
            t.rows_.push_back(std::move(row));
        }
        return t;
    }

    [[nodiscard]] std::size_t column(std::string_view name) const {
        for (std::size_t i = 0; i < header_.size(); ++i)
            if (header_[i] == name) return i;
        throw ParseError(source_, "missing column " + std::string(name));
    }

    [[nodiscard]] const std::vector<std::vector<std::string>>& rows() const { return rows_; }

    [[nodiscard]] double real(std::size_t row, std::size_t col) const {
        const auto& s = rows_[row][col];
        double v = 0.0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) throw ParseError(where(row, col), "expected a number");
        return v;
    }

    [[nodiscard]] std::int64_t integer(std::size_t row, std::size_t col) const {
        const auto& s = rows_[row][col];
        std::int64_t v = 0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) throw ParseError(where(row, col), "expected an integer");
        return v;
    }

private:
    static std::vector<std::string> split(const std::string& line) {
        std::vector<std::string> out;
        std::string cur;
        for (char ch : line) {
            if (ch == ',') {
                out.push_back(std::move(cur));
                cur.clear();
            } else if (ch != '\r') {
                cur.push_back(ch);
            }
        }
        out.push_back(std::move(cur));
        return out;
    }

    [[nodiscard]] std::string where(std::size_t row, std::size_t col) const {
        return source_ + ":" + std::to_string(row + 2) + "." + header_[col];
    }

    std::string source_;
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    return s;
}

} // namespace cofuse::experiment
