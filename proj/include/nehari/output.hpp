#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "nehari/errors.hpp"

namespace nehari {

// Every double in a JSON summary goes through this formatter, so reruns with
// the same config and seed produce byte-identical files.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Minimal JSON value tree with insertion-ordered object keys. Exists because
// the summaries need a fixed number format and a stable key order; it only
// writes, parsing is out of scope.
class Json {
  public:
    using Array = std::vector<Json>;
    using Object = std::vector<std::pair<std::string, Json>>;

    Json() : value_(nullptr) {}
    Json(std::nullptr_t) : value_(nullptr) {}
    Json(bool b) : value_(b) {}
    Json(double v) : value_(v) {}
    Json(int v) : value_(static_cast<std::int64_t>(v)) {}
    Json(long v) : value_(static_cast<std::int64_t>(v)) {}
    Json(long long v) : value_(static_cast<std::int64_t>(v)) {}
    Json(unsigned v) : value_(static_cast<std::int64_t>(v)) {}
    Json(std::size_t v) : value_(static_cast<std::int64_t>(v)) {}
    Json(const char* s) : value_(std::string(s)) {}
    Json(std::string s) : value_(std::move(s)) {}
    Json(Array a) : value_(std::move(a)) {}

    static Json object() {
        Json j;
        j.value_ = Object{};
        return j;
    }
    static Json array() {
        Json j;
        j.value_ = Array{};
        return j;
    }
    static Json array_of(const std::vector<double>& xs) {
        Json j = array();
        for (double x : xs) j.push_back(Json(x));
        return j;
    }

    Json& set(const std::string& key, Json v) {
        std::get<Object>(value_).emplace_back(key, std::move(v));
        return *this;
    }
    Json& push_back(Json v) {
        std::get<Array>(value_).push_back(std::move(v));
        return *this;
    }

    std::string dump(int indent = 2) const {
        std::ostringstream os;
        write(os, indent, 0);
        os << '\n';
        return os.str();
    }

  private:
    std::variant<std::nullptr_t, bool, double, std::int64_t, std::string, Array, Object> value_;

    static void write_escaped(std::ostream& os, const std::string& s) {
        os << '"';
        for (char c : s) {
            switch (c) {
            case '"': os << "\\\""; break;
            case '\\': os << "\\\\"; break;
            case '\n': os << "\\n"; break;
            case '\t': os << "\\t"; break;
            case '\r': os << "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    os << buf;
                } else {
                    os << c;
                }
            }
        }
        os << '"';
    }

    void write(std::ostream& os, int indent, int depth) const {
        const std::string pad(static_cast<std::size_t>(indent) * (depth + 1), ' ');
        const std::string close_pad(static_cast<std::size_t>(indent) * depth, ' ');
        if (std::holds_alternative<std::nullptr_t>(value_)) {
            os << "null";
        } else if (const auto* b = std::get_if<bool>(&value_)) {
            os << (*b ? "true" : "false");
        } else if (const auto* d = std::get_if<double>(&value_)) {
            os << format_double(*d);
        } else if (const auto* i = std::get_if<std::int64_t>(&value_)) {
            os << *i;
        } else if (const auto* s = std::get_if<std::string>(&value_)) {
            write_escaped(os, *s);
        } else if (const auto* a = std::get_if<Array>(&value_)) {
            if (a->empty()) {
                os << "[]";
                return;
            }
            os << "[\n";
            for (std::size_t j = 0; j < a->size(); ++j) {
                os << pad;
                (*a)[j].write(os, indent, depth + 1);
                os << (j + 1 < a->size() ? ",\n" : "\n");
            }
            os << close_pad << ']';
        } else {
            const auto& o = std::get<Object>(value_);
            if (o.empty()) {
                os << "{}";
                return;
            }
            os << "{\n";
            for (std::size_t j = 0; j < o.size(); ++j) {
                os << pad;
                write_escaped(os, o[j].first);
                os << ": ";
                o[j].second.write(os, indent, depth + 1);
                os << (j + 1 < o.size() ? ",\n" : "\n");
            }
            os << close_pad << '}';
        }
    }
};

// FNV-1a, 64 bit. Hashes the canonicalized config text so artifacts can be
// traced back to the exact inputs that produced them.
inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hash_hex(std::uint64_t h) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open '" + path + "' for writing");
    os << content;
    if (!os) throw ConfigError("write failed for '" + path + "'");
}

} // namespace nehari
