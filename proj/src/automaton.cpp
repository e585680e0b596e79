#include "arm/automaton.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <queue>

namespace arm::aut {

namespace {

bool all_pad(const TupleSymbol& t) {
    for (Ch c : t)
        if (c != kPad) return false;
    return true;
}

void check_symbol(const TrackAutomaton& a, const TupleSymbol& t) {
    if (static_cast<int>(t.size()) != a.track_count)
        throw ArityError("tuple symbol length does not match track count");
    if (all_pad(t)) throw AlphabetError("all-pad tuple is not a valid symbol");
    for (Ch c : t)
        if (c != kPad && !a.alphabet.count(c))
            throw AlphabetError("symbol character outside alphabet: " + render_symbol(c));
}

}  // namespace

void TrackAutomaton::add_transition(int from, const TupleSymbol& sym, int to) {
    transitions.push_back({from, sym, to});
}

std::vector<std::vector<std::pair<TupleSymbol, int>>> TrackAutomaton::by_state() const {
    std::vector<std::vector<std::pair<TupleSymbol, int>>> idx(state_count);
    for (const auto& t : transitions) idx[t.from].push_back({t.sym, t.to});
    return idx;
}

TrackAutomaton& TrackAutomaton::finish() {
    for (const auto& t : transitions) check_symbol(*this, t.sym);

    // forward reachability
    std::vector<char> fwd(state_count, 0);
    {
        std::deque<int> q(initial.begin(), initial.end());
        for (int s : initial) fwd[s] = 1;
        auto idx = by_state();
        while (!q.empty()) {
            int s = q.front();
            q.pop_front();
            for (auto& [sym, to] : idx[s])
                if (!fwd[to]) {
                    fwd[to] = 1;
                    q.push_back(to);
                }
        }
    }
    // backward reachability
    std::vector<char> bwd(state_count, 0);
    {
        std::vector<std::vector<int>> rev(state_count);
        for (const auto& t : transitions) rev[t.to].push_back(t.from);
        std::deque<int> q;
        for (int s : accepting)
            if (!bwd[s]) {
                bwd[s] = 1;
                q.push_back(s);
            }
        while (!q.empty()) {
            int s = q.front();
            q.pop_front();
            for (int p : rev[s])
                if (!bwd[p]) {
                    bwd[p] = 1;
                    q.push_back(p);
                }
        }
    }

    std::vector<int> remap(state_count, -1);
    int next = 0;
    for (int s = 0; s < state_count; ++s)
        if (fwd[s] && bwd[s]) remap[s] = next++;

    std::set<int> new_init, new_acc;
    for (int s : initial)
        if (remap[s] >= 0) new_init.insert(remap[s]);
    for (int s : accepting)
        if (remap[s] >= 0) new_acc.insert(remap[s]);

    std::vector<Transition> kept;
    kept.reserve(transitions.size());
    std::set<std::tuple<int, TupleSymbol, int>> seen;
    for (const auto& t : transitions) {
        if (remap[t.from] < 0 || remap[t.to] < 0) continue;
        auto key = std::make_tuple(remap[t.from], t.sym, remap[t.to]);
        if (seen.insert(key).second) kept.push_back({remap[t.from], t.sym, remap[t.to]});
    }

    state_count = next;
    initial = std::move(new_init);
    accepting = std::move(new_acc);
    transitions = std::move(kept);

    deterministic_flag = initial.size() <= 1;
    if (deterministic_flag) {
        std::set<std::pair<int, TupleSymbol>> keys;
        for (const auto& t : transitions)
            if (!keys.insert({t.from, t.sym}).second) {
                deterministic_flag = false;
                break;
            }
    }
    return *this;
}

bool TrackAutomaton::accepts_tuples(const std::vector<TupleSymbol>& word) const {
    std::set<int> cur(initial.begin(), initial.end());
    auto idx = by_state();
    for (const auto& sym : word) {
        std::set<int> next;
        for (int s : cur)
            for (auto& [t, to] : idx[s])
                if (t == sym) next.insert(to);
        cur = std::move(next);
        if (cur.empty()) return false;
    }
    for (int s : cur)
        if (accepting.count(s)) return true;
    return false;
}

bool TrackAutomaton::accepts_words(const std::vector<Str>& words) const {
    return accepts_tuples(convolve(words));
}

std::optional<std::vector<TupleSymbol>> TrackAutomaton::some_word(size_t max_len) const {
    // BFS over states; reconstruct the shortest (then lex-smallest) witness.
    std::vector<int> parent(state_count, -2);
    std::vector<TupleSymbol> via(state_count);
    std::deque<int> q;
    for (int s : initial) {
        parent[s] = -1;
        q.push_back(s);
    }
    auto idx = by_state();
    for (auto& v : idx)
        std::sort(v.begin(), v.end());
    int found = -1;
    for (int s : initial)
        if (accepting.count(s)) found = s;
    size_t frontier_len = 0;
    while (!q.empty() && found < 0 && frontier_len < max_len) {
        std::deque<int> nq;
        for (int s : q) {
            for (auto& [sym, to] : idx[s]) {
                if (parent[to] != -2) continue;
                parent[to] = s;
                via[to] = sym;
                if (accepting.count(to) && found < 0) found = to;
                nq.push_back(to);
            }
            if (found >= 0) break;
        }
        q = std::move(nq);
        ++frontier_len;
    }
    if (found < 0) return std::nullopt;
    std::vector<TupleSymbol> word;
    for (int s = found; parent[s] != -1; s = parent[s]) word.push_back(via[s]);
    std::reverse(word.begin(), word.end());
    return word;
}

size_t TrackAutomaton::shortest_accepted_length() const {
    auto w = some_word();
    if (!w) throw std::runtime_error("empty language has no accepted word");
    return w->size();
}

std::vector<TupleSymbol> convolve(const std::vector<Str>& words) {
    if (words.empty()) throw ArityError("convolve needs at least one word");
    size_t r = 0;
    for (const auto& w : words) {
        r = std::max(r, w.size());
        for (Ch c : w)
            if (c == kPad) throw AlphabetError("pad character inside a track word");
    }
    std::vector<TupleSymbol> out;
    out.reserve(r);
    for (size_t i = 0; i < r; ++i) {
        TupleSymbol t;
        t.reserve(words.size());
        for (const auto& w : words) t.push_back(i < w.size() ? w[i] : kPad);
        out.push_back(std::move(t));
    }
    return out;
}

std::vector<Str> deconvolve(const std::vector<TupleSymbol>& conv) {
    if (conv.empty()) return {Str{}};
    size_t k = conv[0].size();
    std::vector<Str> words(k);
    std::vector<bool> ended(k, false);
    for (const auto& t : conv) {
        if (t.size() != k) throw ArityError("ragged tuple string");
        if (all_pad(t)) throw AlphabetError("all-pad tuple in convolution");
        for (size_t j = 0; j < k; ++j) {
            if (t[j] == kPad) {
                ended[j] = true;
            } else {
                if (ended[j])
                    throw AlphabetError("malformed convolution: pad in non-trailing position");
                words[j].push_back(t[j]);
            }
        }
    }
    return words;
}

// --- product-style combinators ---

static void require_compatible(const TrackAutomaton& a, const TrackAutomaton& b) {
    if (a.track_count != b.track_count)
        throw ArityError("track count mismatch in boolean combination");
    if (a.alphabet != b.alphabet) throw AlphabetError("alphabet mismatch in boolean combination");
}

TrackAutomaton intersect(const TrackAutomaton& a, const TrackAutomaton& b) {
    require_compatible(a, b);
    TrackAutomaton out;
    out.track_count = a.track_count;
    out.alphabet = a.alphabet;
    std::map<std::pair<int, int>, int> ids;
    std::deque<std::pair<int, int>> q;
    auto id_of = [&](int x, int y) {
        auto it = ids.find({x, y});
        if (it != ids.end()) return it->second;
        int id = out.add_state();
        ids[{x, y}] = id;
        q.push_back({x, y});
        return id;
    };
    auto ia = a.by_state();
    // index b by (state, symbol)
    std::map<std::pair<int, TupleSymbol>, std::vector<int>> ib;
    for (const auto& t : b.transitions) ib[{t.from, t.sym}].push_back(t.to);

    for (int x : a.initial)
        for (int y : b.initial) out.initial.insert(id_of(x, y));
    while (!q.empty()) {
        auto [x, y] = q.front();
        q.pop_front();
        int from = ids[{x, y}];
        if (a.accepting.count(x) && b.accepting.count(y)) out.accepting.insert(from);
        for (auto& [sym, xt] : ia[x]) {
            auto it = ib.find({y, sym});
            if (it == ib.end()) continue;
            for (int yt : it->second) out.add_transition(from, sym, id_of(xt, yt));
        }
    }
    return out.finish();
}

TrackAutomaton unite(const TrackAutomaton& a, const TrackAutomaton& b) {
    require_compatible(a, b);
    TrackAutomaton out;
    out.track_count = a.track_count;
    out.alphabet = a.alphabet;
    out.state_count = a.state_count + b.state_count;
    for (int s : a.initial) out.initial.insert(s);
    for (int s : a.accepting) out.accepting.insert(s);
    for (const auto& t : a.transitions) out.add_transition(t.from, t.sym, t.to);
    for (int s : b.initial) out.initial.insert(a.state_count + s);
    for (int s : b.accepting) out.accepting.insert(a.state_count + s);
    for (const auto& t : b.transitions)
        out.add_transition(a.state_count + t.from, t.sym, a.state_count + t.to);
    return out.finish();
}

namespace {

std::vector<TupleSymbol> full_tuple_alphabet(int k, const std::set<Ch>& sigma) {
    double est = 1;
    for (int i = 0; i < k; ++i) est *= static_cast<double>(sigma.size()) + 1;
    if (est > 2e5)
        throw ResourceError("tuple alphabet too large to materialize for this operation");
    std::vector<TupleSymbol> out;
    std::vector<Ch> chars(sigma.begin(), sigma.end());
    chars.push_back(kPad);
    std::vector<size_t> idx(k, 0);
    while (true) {
        TupleSymbol t;
        for (int i = 0; i < k; ++i) t.push_back(chars[idx[i]]);
        if (!all_pad(t)) out.push_back(t);
        int pos = k - 1;
        while (pos >= 0 && ++idx[pos] == chars.size()) idx[pos--] = 0;
        if (pos < 0) break;
    }
    return out;
}

}  // namespace

TrackAutomaton determinize(const TrackAutomaton& a) {
    TrackAutomaton out;
    out.track_count = a.track_count;
    out.alphabet = a.alphabet;
    std::map<std::set<int>, int> ids;
    std::deque<std::set<int>> q;
    std::set<int> start(a.initial.begin(), a.initial.end());
    if (!start.empty()) {
        ids[start] = out.add_state();
        q.push_back(start);
        out.initial.insert(0);
    }
    auto idx = a.by_state();
    while (!q.empty()) {
        auto cur = q.front();
        q.pop_front();
        int from = ids[cur];
        for (int s : cur)
            if (a.accepting.count(s)) {
                out.accepting.insert(from);
                break;
            }
        std::map<TupleSymbol, std::set<int>> next;
        for (int s : cur)
            for (auto& [sym, to] : idx[s]) next[sym].insert(to);
        for (auto& [sym, ns] : next) {
            auto it = ids.find(ns);
            int id;
            if (it == ids.end()) {
                id = out.add_state();
                ids[ns] = id;
                q.push_back(ns);
            } else {
                id = it->second;
            }
            out.add_transition(from, sym, id);
        }
    }
    return out.finish();
}

TrackAutomaton minimize_dfa(const TrackAutomaton& dfa) {
    if (dfa.state_count == 0) return dfa;
    // Moore refinement with an implicit dead state (partition id -1).
    std::map<std::pair<int, TupleSymbol>, int> delta;
    std::set<TupleSymbol> symbols;
    for (const auto& t : dfa.transitions) {
        delta[{t.from, t.sym}] = t.to;
        symbols.insert(t.sym);
    }
    std::vector<int> part(dfa.state_count);
    for (int s = 0; s < dfa.state_count; ++s) part[s] = dfa.accepting.count(s) ? 1 : 0;
    int nparts = 2;
    while (true) {
        std::map<std::vector<int>, int> sig_ids;
        std::vector<int> next_part(dfa.state_count);
        for (int s = 0; s < dfa.state_count; ++s) {
            std::vector<int> sig;
            sig.push_back(part[s]);
            for (const auto& sym : symbols) {
                auto it = delta.find({s, sym});
                sig.push_back(it == delta.end() ? -1 : part[it->second]);
            }
            auto ins = sig_ids.insert({sig, static_cast<int>(sig_ids.size())});
            next_part[s] = ins.first->second;
        }
        int n2 = static_cast<int>(sig_ids.size());
        part = std::move(next_part);
        if (n2 == nparts) break;
        nparts = n2;
    }
    TrackAutomaton out;
    out.track_count = dfa.track_count;
    out.alphabet = dfa.alphabet;
    out.state_count = nparts;
    for (int s : dfa.initial) out.initial.insert(part[s]);
    for (int s : dfa.accepting) out.accepting.insert(part[s]);
    std::set<std::tuple<int, TupleSymbol, int>> seen;
    for (const auto& [key, to] : delta) {
        auto k = std::make_tuple(part[key.first], key.second, part[to]);
        if (seen.insert(k).second)
            out.add_transition(std::get<0>(k), std::get<1>(k), std::get<2>(k));
    }
    return out.finish();
}

TrackAutomaton determinize_minimize(const TrackAutomaton& a) {
    return minimize_dfa(determinize(a));
}

TrackAutomaton wellformed_universe(int k, const std::set<Ch>& sigma) {
    // State = set of tracks that have started padding, encoded as a bitmask.
    // The all-tracks mask is unreachable because the all-pad tuple is banned.
    if (k > 16) throw ResourceError("too many tracks for the universe automaton");
    auto symbols = full_tuple_alphabet(k, sigma);
    TrackAutomaton out;
    out.track_count = k;
    out.alphabet = sigma;
    int full = (1 << k) - 1;
    std::vector<int> id(1 << k, -1);
    for (int m = 0; m < full; ++m) {
        id[m] = out.add_state();
        out.accepting.insert(id[m]);
    }
    out.initial.insert(id[0]);
    for (int m = 0; m < full; ++m) {
        for (const auto& sym : symbols) {
            int m2 = 0;
            bool ok = true;
            for (int i = 0; i < k; ++i) {
                bool pad = sym[i] == kPad;
                if ((m >> i) & 1) {
                    if (!pad) {
                        ok = false;
                        break;
                    }
                }
                if (pad) m2 |= 1 << i;
            }
            if (!ok || m2 == full) continue;
            out.add_transition(id[m], sym, id[m2]);
        }
    }
    return out.finish();
}

TrackAutomaton complement(const TrackAutomaton& a) {
    auto symbols = full_tuple_alphabet(a.track_count, a.alphabet);
    TrackAutomaton det = determinize(a);
    // Complete with a sink, swap accepting.
    TrackAutomaton out;
    out.track_count = a.track_count;
    out.alphabet = a.alphabet;
    out.state_count = det.state_count + 1;
    int sink = det.state_count;
    if (det.state_count == 0) {
        out.initial.insert(sink);
    } else {
        out.initial = det.initial;
    }
    std::map<std::pair<int, TupleSymbol>, int> delta;
    for (const auto& t : det.transitions) delta[{t.from, t.sym}] = t.to;
    for (int s = 0; s < det.state_count; ++s)
        if (!det.accepting.count(s)) out.accepting.insert(s);
    out.accepting.insert(sink);
    for (int s = 0; s <= det.state_count; ++s) {
        for (const auto& sym : symbols) {
            int to = sink;
            auto it = delta.find({s, sym});
            if (s < det.state_count && it != delta.end()) to = it->second;
            out.add_transition(s, sym, to);
        }
    }
    out.finish();
    return intersect(out, wellformed_universe(a.track_count, a.alphabet));
}

TrackAutomaton boolean_combine(const TrackAutomaton& a, const TrackAutomaton* b, BoolMode mode) {
    switch (mode) {
        case BoolMode::Union:
            if (!b) throw ArityError("union needs two operands");
            return unite(a, *b);
        case BoolMode::Intersect:
            if (!b) throw ArityError("intersect needs two operands");
            return intersect(a, *b);
        case BoolMode::Complement:
            return complement(a);
    }
    throw std::logic_error("unreachable");
}

TrackAutomaton project(const TrackAutomaton& a, const std::vector<int>& keep) {
    if (keep.empty()) throw ArityError("projection must keep at least one track");
    for (int t : keep)
        if (t < 0 || t >= a.track_count) throw ArityError("projection track out of range");

    // Map symbols; all-pad projections become epsilon moves.
    struct Edge {
        int to;
        bool eps;
        TupleSymbol sym;
    };
    std::vector<std::vector<Edge>> edges(a.state_count);
    for (const auto& t : a.transitions) {
        TupleSymbol sym;
        for (int i : keep) sym.push_back(t.sym[i]);
        bool eps = all_pad(sym);
        edges[t.from].push_back({t.to, eps, eps ? TupleSymbol{} : sym});
    }
    // epsilon closure
    std::vector<std::set<int>> closure(a.state_count);
    for (int s = 0; s < a.state_count; ++s) {
        std::deque<int> q{s};
        closure[s].insert(s);
        while (!q.empty()) {
            int x = q.front();
            q.pop_front();
            for (const auto& e : edges[x])
                if (e.eps && closure[s].insert(e.to).second) q.push_back(e.to);
        }
    }
    TrackAutomaton out;
    out.track_count = static_cast<int>(keep.size());
    out.alphabet = a.alphabet;
    out.state_count = a.state_count;
    for (int s : a.initial) out.initial.insert(s);
    for (int s = 0; s < a.state_count; ++s)
        for (int c : closure[s])
            if (a.accepting.count(c)) {
                out.accepting.insert(s);
                break;
            }
    // transitions: from s via closure, one loud edge, then land on target
    // (the target's own closure is reflected in its accepting flag and its
    // outgoing loud edges computed the same way).
    for (int s = 0; s < a.state_count; ++s) {
        std::set<std::pair<TupleSymbol, int>> added;
        for (int c : closure[s])
            for (const auto& e : edges[c])
                if (!e.eps && added.insert({e.sym, e.to}).second)
                    out.add_transition(s, e.sym, e.to);
    }
    return out.finish();
}

TrackAutomaton embed(const TrackAutomaton& a, int new_track_count,
                     const std::vector<int>& mapping, const std::set<Ch>& sigma) {
    if (static_cast<int>(mapping.size()) != a.track_count)
        throw ArityError("embed mapping arity mismatch");
    std::vector<bool> is_mapped(new_track_count, false);
    for (int m : mapping) {
        if (m < 0 || m >= new_track_count) throw ArityError("embed mapping out of range");
        is_mapped[m] = true;
    }
    std::vector<int> free_tracks;
    for (int i = 0; i < new_track_count; ++i)
        if (!is_mapped[i]) free_tracks.push_back(i);

    std::vector<Ch> chars(sigma.begin(), sigma.end());
    chars.push_back(kPad);
    double est = static_cast<double>(a.transitions.size() + a.accepting.size() + 1);
    for (size_t i = 0; i < free_tracks.size(); ++i) est *= chars.size();
    if (est > 4e6) throw ResourceError("embed blowup beyond configured ceiling");

    TrackAutomaton out;
    out.track_count = new_track_count;
    out.alphabet = sigma;
    out.state_count = a.state_count + 1;
    int pad_state = a.state_count;
    out.initial = a.initial;
    out.accepting = a.accepting;
    out.accepting.insert(pad_state);

    auto expand = [&](int from, const TupleSymbol& base, int to) {
        // enumerate free-track assignments
        size_t n = free_tracks.size();
        std::vector<size_t> idx(n, 0);
        while (true) {
            TupleSymbol t(new_track_count, kPad);
            for (int i = 0; i < a.track_count; ++i) t[mapping[i]] = base[i];
            for (size_t i = 0; i < n; ++i) t[free_tracks[i]] = chars[idx[i]];
            bool all = true;
            for (Ch c : t)
                if (c != kPad) all = false;
            if (!all) out.add_transition(from, t, to);
            if (n == 0) break;
            size_t pos = n;
            while (pos > 0) {
                if (++idx[pos - 1] < chars.size()) break;
                idx[pos - 1] = 0;
                --pos;
            }
            if (pos == 0) break;
        }
    };

    for (const auto& t : a.transitions) expand(t.from, t.sym, t.to);
    // pad extension after acceptance: mapped tracks stay '#'
    TupleSymbol pads(a.track_count, kPad);
    if (!free_tracks.empty()) {
        for (int acc : a.accepting) expand(acc, pads, pad_state);
        expand(pad_state, pads, pad_state);
    }
    return out.finish();
}

TrackAutomaton literal_automaton(const std::vector<TupleSymbol>& word, int k,
                                 const std::set<Ch>& sigma) {
    TrackAutomaton out;
    out.track_count = k;
    out.alphabet = sigma;
    int prev = out.add_state();
    out.initial.insert(prev);
    for (const auto& sym : word) {
        int next = out.add_state();
        out.add_transition(prev, sym, next);
        prev = next;
    }
    out.accepting.insert(prev);
    return out.finish();
}

std::vector<std::vector<TupleSymbol>> all_tuple_strings(int k, const std::set<Ch>& sigma,
                                                        size_t max_len) {
    auto symbols = full_tuple_alphabet(k, sigma);
    std::vector<std::vector<TupleSymbol>> out{{}};
    std::vector<std::vector<TupleSymbol>> frontier{{}};
    for (size_t len = 1; len <= max_len; ++len) {
        std::vector<std::vector<TupleSymbol>> next;
        for (const auto& w : frontier)
            for (const auto& s : symbols) {
                auto w2 = w;
                w2.push_back(s);
                next.push_back(w2);
            }
        out.insert(out.end(), next.begin(), next.end());
        frontier = std::move(next);
    }
    return out;
}

bool language_equal_upto(const TrackAutomaton& a, const TrackAutomaton& b, size_t max_len) {
    if (a.track_count != b.track_count) return false;
    std::set<Ch> sigma = a.alphabet;
    for (Ch c : b.alphabet) sigma.insert(c);
    for (const auto& w : all_tuple_strings(a.track_count, sigma, max_len))
        if (a.accepts_tuples(w) != b.accepts_tuples(w)) return false;
    return true;
}

}  // namespace arm::aut
