#include "arm/chars.hpp"

#include <cstdio>

namespace arm {

Str to_u32(const std::string& s) {
    Str out;
    out.reserve(s.size());
    for (unsigned char c : s) out.push_back(static_cast<Ch>(c));
    return out;
}

std::string from_u32(const Str& s) {
    std::string out;
    out.reserve(s.size());
    for (Ch c : s) {
        if (c < 0x80) {
            out.push_back(static_cast<char>(c));
        } else {
            out += render_symbol(c);
        }
    }
    return out;
}

std::string render_symbol(Ch c) {
    if (c >= 0x21 && c < 0x7f) return std::string(1, static_cast<char>(c));
    char buf[16];
    std::snprintf(buf, sizeof(buf), "<%x>", static_cast<unsigned>(c));
    return buf;
}

std::string render_str(const Str& s) {
    std::string out;
    for (Ch c : s) out += render_symbol(c);
    return out;
}

}  // namespace arm
