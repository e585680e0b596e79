#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace arm {

// Register contents and automaton tracks are strings of 32-bit symbols.
// Plain ASCII covers most programs; generated alphabets (e.g. one symbol
// per nonterminal subset) live in a private plane above 0x100000.
using Ch = char32_t;
using Str = std::u32string;

inline constexpr Ch kPad = U'#';

// Base for synthesized symbols that have no ASCII rendering.
inline constexpr Ch kSynthBase = 0x100000;

// Marked variants of a base character: pack a small mark id next to the
// base char. Used by generated programs that decorate payload characters
// with cursor/tick/verdict marks.
inline constexpr Ch kMarkBase = 0x200000;
inline constexpr Ch kMarkStride = 0x10000;

inline Ch marked(Ch base, int mark) {
    return kMarkBase + static_cast<Ch>(mark) * kMarkStride + base;
}
inline bool is_marked(Ch c) { return c >= kMarkBase; }
inline Ch mark_of(Ch c) { return (c - kMarkBase) / kMarkStride; }
inline Ch base_of(Ch c) { return is_marked(c) ? (c - kMarkBase) % kMarkStride : c; }

Str to_u32(const std::string& s);
std::string from_u32(const Str& s);

// Escaped rendering: printable ASCII passes through, everything else is
// <hex>. Parsing accepts both. Used by the automaton text format and traces.
std::string render_symbol(Ch c);
std::string render_str(const Str& s);

}  // namespace arm
