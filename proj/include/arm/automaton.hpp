#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "arm/chars.hpp"

namespace arm::aut {

// One position of a convolution: a fixed-length tuple of track characters,
// each from the track alphabet extended by the pad '#'. The all-pad tuple
// is never a valid symbol.
using TupleSymbol = Str;

struct Transition {
    int from;
    TupleSymbol sym;
    int to;
};

class AlphabetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class ArityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Finite automaton over tuple symbols; the representation of every
// automatic relation and function. States are dense ints. Automata are
// trimmed (reachable and co-reachable) on construction via finish() and
// immutable afterwards.
struct TrackAutomaton {
    int track_count = 1;
    std::set<Ch> alphabet;            // excludes the pad
    int state_count = 0;
    std::set<int> initial;
    std::set<int> accepting;
    std::vector<Transition> transitions;
    bool deterministic_flag = false;

    // --- construction helpers (before finish) ---
    int add_state() { return state_count++; }
    void add_transition(int from, const TupleSymbol& sym, int to);

    // Trim to useful states, validate symbols, and set deterministic_flag.
    // Returns *this for chaining.
    TrackAutomaton& finish();

    bool empty_language() const { return state_count == 0 || accepting.empty(); }

    // Membership of a raw tuple string.
    bool accepts_tuples(const std::vector<TupleSymbol>& word) const;
    // Membership of the convolution of the given track words.
    bool accepts_words(const std::vector<Str>& words) const;

    // Lexicographically smallest accepted tuple string, if any (used by
    // emptiness witnesses and budget checks). Lengths capped by max_len.
    std::optional<std::vector<TupleSymbol>> some_word(size_t max_len = 1 << 20) const;

    size_t shortest_accepted_length() const;  // throws if empty language

    // Map over states keeping the language; internal utility.
    std::vector<std::vector<std::pair<TupleSymbol, int>>> by_state() const;
};

// --- convolution ---
std::vector<TupleSymbol> convolve(const std::vector<Str>& words);
std::vector<Str> deconvolve(const std::vector<TupleSymbol>& conv);

// --- combinators ---
enum class BoolMode { Union, Intersect, Complement };

TrackAutomaton boolean_combine(const TrackAutomaton& a, const TrackAutomaton* b, BoolMode mode);
TrackAutomaton intersect(const TrackAutomaton& a, const TrackAutomaton& b);
TrackAutomaton unite(const TrackAutomaton& a, const TrackAutomaton& b);
// Complement relative to well-formed convolutions over a's alphabet.
TrackAutomaton complement(const TrackAutomaton& a);

TrackAutomaton determinize(const TrackAutomaton& a);
TrackAutomaton minimize_dfa(const TrackAutomaton& a);
TrackAutomaton determinize_minimize(const TrackAutomaton& a);

// Keep the given tracks (0-based, strictly increasing); tuples that become
// all-pad act as silent transitions and are eliminated immediately.
TrackAutomaton project(const TrackAutomaton& a, const std::vector<int>& keep);

// Spread a's tracks over a wider tuple: track i of a becomes track
// mapping[i]. New tracks range over sigma ∪ {#}; after a accepts, the new
// tracks may continue while the mapped tracks stay padded. Intersect with
// wellformed_universe to discard junk pad placements.
TrackAutomaton embed(const TrackAutomaton& a, int new_track_count,
                     const std::vector<int>& mapping, const std::set<Ch>& sigma);

// All well-formed convolutions of k tracks over sigma ('#' only as a
// contiguous suffix per track, never on all tracks at once).
TrackAutomaton wellformed_universe(int k, const std::set<Ch>& sigma);

// Automaton accepting exactly {conv(ws)} for one tuple string (test helper).
TrackAutomaton literal_automaton(const std::vector<TupleSymbol>& word, int k,
                                 const std::set<Ch>& sigma);

bool language_equal_upto(const TrackAutomaton& a, const TrackAutomaton& b, size_t max_len);

// Enumerate every tuple string of length <= max_len over the full tuple
// alphabet of (sigma ∪ #)^k minus all-pad. Test oracle helper; exponential.
std::vector<std::vector<TupleSymbol>> all_tuple_strings(int k, const std::set<Ch>& sigma,
                                                        size_t max_len);

}  // namespace arm::aut
