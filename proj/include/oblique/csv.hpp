#pragma once

#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

namespace oblique::csv {

/// Real with 17 significant digits, '.' decimal separator.
inline std::string real(double v)
{
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::setprecision(17) << v;
    return os.str();
}

inline std::string real(const std::optional<double>& v)
{
    return v ? real(*v) : std::string{};
}

/// Quotes a field when it contains a separator, quote or newline.
inline std::string field(std::string_view text)
{
    if (text.find_first_of(",\"\r\n") == std::string_view::npos) {
        return std::string(text);
    }
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

/// Writes "# key=value ..." so every output records the configuration that produced it.
inline void comment(std::ostream& os, std::string_view text)
{
    os << "# " << text << '\n';
}

} // namespace oblique::csv
