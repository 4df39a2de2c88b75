#pragma once

#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

namespace cpnet::csv {

/// Shortest-ish decimal form with a dot separator, independent of the C locale.
inline std::string number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    std::string s(buf);
    for (char& c : s)
        if (c == ',') c = '.';
    return s;
}

inline std::string number(const std::optional<double>& v) { return v ? number(*v) : std::string(); }

/// RFC 4180 quoting: fields containing a separator, quote or line break are quoted.
inline std::string field(std::string_view s) {
    if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace cpnet::csv
