#include "arm/onepass.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace arm::onepass {

using aut::TrackAutomaton;
using aut::TupleSymbol;

namespace {

constexpr size_t kStateCeiling = 300000;

std::vector<Str> tuple_universe(const std::vector<std::set<Ch>>& in_alphabets) {
    std::vector<std::vector<Ch>> per;
    for (const auto& a : in_alphabets) {
        std::vector<Ch> v(a.begin(), a.end());
        v.push_back(kPad);
        per.push_back(std::move(v));
    }
    std::vector<Str> out;
    std::vector<size_t> idx(per.size(), 0);
    while (true) {
        Str t;
        for (size_t i = 0; i < per.size(); ++i) t.push_back(per[i][idx[i]]);
        bool all = std::all_of(t.begin(), t.end(), [](Ch c) { return c == kPad; });
        if (!all) out.push_back(t);
        size_t pos = per.size();
        while (pos > 0) {
            if (++idx[pos - 1] < per[pos - 1].size()) break;
            idx[pos - 1] = 0;
            --pos;
        }
        if (pos == 0) break;
    }
    return out;
}

// surplus between the claim stream (output-track characters) and the
// emission stream; side: 0 = claims waiting, 1 = emissions waiting
bool surplus_claim(int& side, Str& buf, Ch yc) {
    if (side == 1 && !buf.empty()) {
        if (buf[0] != yc) return false;
        buf.erase(buf.begin());
        if (buf.empty()) side = 0;
        return true;
    }
    side = 0;
    buf.push_back(yc);
    return true;
}

bool surplus_emit(int& side, Str& buf, Ch c) {
    if (side == 0 && !buf.empty()) {
        if (buf[0] != c) return false;
        buf.erase(buf.begin());
        return true;
    }
    side = 1;
    buf.push_back(c);
    return true;
}

struct SState {
    int mode;  // 0 live, 1 output-done (L2R only), 2 input-done (L2R only)
    int q;
    int side;
    Str buf;
    bool x_started = false;  // R2L scan bookkeeping
    bool y_started = false;

    bool operator<(const SState& o) const {
        return std::tie(mode, q, side, buf, x_started, y_started) <
               std::tie(o.mode, o.q, o.side, o.buf, o.x_started, o.y_started);
    }
};

struct Builder {
    const OnePassSpec& spec;
    size_t drift_cap;
    std::vector<Str> tuples;
    std::map<std::pair<int, Str>, std::optional<std::pair<int, Str>>> rw_cache;
    std::vector<Str> flushes;
    // live behind-buffers per pass state: prefixes of achievable future
    // emission streams (truncated to the cap); emission order follows the
    // scan direction
    std::vector<std::set<Str>> live_behind;

    explicit Builder(const OnePassSpec& s) : spec(s) {
        drift_cap = static_cast<size_t>(std::max<long long>(spec.bound, 2)) + 2;
        tuples = tuple_universe(spec.in_alphabets);
        flushes.resize(spec.n_states);
        for (int q = 0; q < spec.n_states; ++q) {
            flushes[q] = spec.flush(q);
            if (flushes[q].size() > static_cast<size_t>(std::max<long long>(spec.bound, 0)))
                throw SpecError("flush longer than the declared bound");
        }
        compute_live_behind();
    }

    Str scan_em(const Str& em) const {
        if (spec.direction == OnePassSpec::Dir::L2R) return em;
        Str r = em;
        std::reverse(r.begin(), r.end());
        return r;
    }
    Str scan_flush(int q) const { return scan_em(flushes[q]); }

    const std::optional<std::pair<int, Str>>& rw(int q, const Str& t) {
        auto it = rw_cache.find({q, t});
        if (it == rw_cache.end()) {
            auto r = spec.rewrite(q, t);
            if (r && r->second.size() > 2) throw SpecError("per-step emission longer than 2");
            if (r && (r->first < 0 || r->first >= spec.n_states))
                throw SpecError("rewrite target state out of range");
            it = rw_cache.insert({{q, t}, std::move(r)}).first;
        }
        return it->second;
    }

    void compute_live_behind() {
        // fixpoint: s in live_behind[q] iff s is a prefix of some emission
        // stream producible from q (rewrites then flush), |s| <= cap.
        live_behind.assign(spec.n_states, {});
        auto prefixes_into = [&](std::set<Str>& dst, const Str& s) {
            bool grew = false;
            for (size_t l = 0; l <= std::min(s.size(), drift_cap); ++l)
                grew |= dst.insert(s.substr(0, l)).second;
            return grew;
        };
        for (int q = 0; q < spec.n_states; ++q) prefixes_into(live_behind[q], scan_flush(q));
        bool changed = true;
        while (changed) {
            changed = false;
            for (int q = 0; q < spec.n_states; ++q) {
                for (const auto& t : tuples) {
                    const auto& r = rw(q, t);
                    if (!r) continue;
                    const auto& [q2, em] = *r;
                    for (const auto& cont : live_behind[q2]) {
                        Str s = scan_em(em) + cont;
                        if (s.size() > drift_cap) s.resize(drift_cap);
                        changed |= prefixes_into(live_behind[q], s);
                    }
                }
            }
        }
    }

    bool behind_ok(int q, const Str& buf) const {
        return live_behind[q].count(buf) > 0;
    }
};

// Consume emission characters against the surplus; true if consistent.
bool feed_emission(int& side, Str& buf, const Str& em, size_t cap) {
    for (Ch c : em) {
        if (!surplus_emit(side, buf, c)) return false;
        if (buf.size() > cap) return false;
    }
    return true;
}

TrackAutomaton reverse_automaton(const TrackAutomaton& a) {
    TrackAutomaton out;
    out.track_count = a.track_count;
    out.alphabet = a.alphabet;
    out.state_count = a.state_count;
    out.initial = a.accepting;
    out.accepting = a.initial;
    for (const auto& t : a.transitions) out.add_transition(t.to, t.sym, t.from);
    return out;  // caller finishes
}

TrackAutomaton build_l2r(Builder& B) {
    const auto& spec = B.spec;
    std::map<SState, int> ids;
    std::deque<SState> work;
    TrackAutomaton A;
    A.track_count = spec.arity + 1;
    for (const auto& al : spec.in_alphabets)
        for (Ch c : al) A.alphabet.insert(c);
    for (Ch c : spec.out_alphabet) A.alphabet.insert(c);

    auto id_of = [&](const SState& s) {
        auto it = ids.find(s);
        if (it != ids.end()) return it->second;
        if (ids.size() >= kStateCeiling)
            throw aut::ResourceError("one-pass construction exceeded the state ceiling");
        int id = A.add_state();
        ids[s] = id;
        work.push_back(s);
        return id;
    };

    SState init{0, spec.initial, 0, {}, false, false};
    A.initial.insert(id_of(init));

    auto accept_of = [&](const SState& s) {
        if (s.mode == 0) {
            if (s.side == 1 && !s.buf.empty()) return false;
            return B.flushes[s.q] == s.buf;
        }
        if (s.mode == 1) return B.flushes[s.q] == s.buf;
        return s.buf.empty();
    };

    std::vector<Ch> ycs(spec.out_alphabet.begin(), spec.out_alphabet.end());

    while (!work.empty()) {
        SState s = work.front();
        work.pop_front();
        int from = ids[s];
        if (accept_of(s)) A.accepting.insert(from);

        if (s.mode == 2) {
            // input exhausted; remaining output characters must match buf
            if (!s.buf.empty()) {
                TupleSymbol sym(spec.arity, kPad);
                sym.push_back(s.buf[0]);
                SState n = s;
                n.buf.erase(n.buf.begin());
                A.add_transition(from, sym, id_of(n));
            }
            continue;
        }

        for (const auto& t : B.tuples) {
            bool t_pad = std::all_of(t.begin(), t.end(), [](Ch c) { return c == kPad; });
            if (s.mode == 1) {
                // output done: input continues, no claims
                if (t_pad) continue;
                const auto& r = B.rw(s.q, t);
                if (!r) continue;
                auto [q2, em] = *r;
                Str buf = s.buf;
                bool ok = true;
                for (Ch c : em) {
                    if (buf.empty() || buf[0] != c) {
                        ok = false;
                        break;
                    }
                    buf.erase(buf.begin());
                }
                if (!ok) continue;
                TupleSymbol sym = t;
                sym.push_back(kPad);
                SState n{1, q2, 0, buf, true, true};
                A.add_transition(from, sym, id_of(n));
                continue;
            }
            // mode 0
            if (t_pad) {
                // input exhausted, output continues: flush becomes the tail
                Str expect;
                if (s.side == 1) {
                    expect = s.buf + B.flushes[s.q];
                } else {
                    const Str& f = B.flushes[s.q];
                    if (f.size() < s.buf.size() || Str(f.substr(0, s.buf.size())) != s.buf)
                        continue;
                    expect = f.substr(s.buf.size());
                }
                if (expect.empty()) continue;  // conv would have ended already
                TupleSymbol sym(spec.arity, kPad);
                sym.push_back(expect[0]);
                SState n{2, 0, 0, expect.substr(1), true, true};
                A.add_transition(from, sym, id_of(n));
                continue;
            }
            const auto& r = B.rw(s.q, t);
            if (!r) continue;
            const auto& [q2, em] = *r;
            // output ends at this position
            {
                if (!(s.side == 1 && !s.buf.empty())) {
                    Str buf = s.buf;  // behind buffer (claims waiting)
                    bool ok = true;
                    for (Ch c : em) {
                        if (buf.empty() || buf[0] != c) {
                            ok = false;
                            break;
                        }
                        buf.erase(buf.begin());
                    }
                    if (ok) {
                        TupleSymbol sym = t;
                        sym.push_back(kPad);
                        SState n{1, q2, 0, buf, true, true};
                        A.add_transition(from, sym, id_of(n));
                    }
                }
            }
            // output continues: try every claim character
            for (Ch yc : ycs) {
                int side = s.side;
                Str buf = s.buf;
                if (!surplus_claim(side, buf, yc)) continue;
                if (buf.size() > B.drift_cap) continue;
                if (!feed_emission(side, buf, em, B.drift_cap)) continue;
                if (side == 0 && !B.behind_ok(q2, buf)) continue;
                TupleSymbol sym = t;
                sym.push_back(yc);
                SState n{0, q2, side, buf, true, true};
                A.add_transition(from, sym, id_of(n));
            }
        }
    }
    return A.finish();
}

TrackAutomaton build_r2l(Builder& B) {
    const auto& spec = B.spec;
    std::map<SState, int> ids;
    std::deque<SState> work;
    TrackAutomaton A;
    A.track_count = spec.arity + 1;
    for (const auto& al : spec.in_alphabets)
        for (Ch c : al) A.alphabet.insert(c);
    for (Ch c : spec.out_alphabet) A.alphabet.insert(c);

    auto id_of = [&](const SState& s) {
        auto it = ids.find(s);
        if (it != ids.end()) return it->second;
        if (ids.size() >= kStateCeiling)
            throw aut::ResourceError("one-pass construction exceeded the state ceiling");
        int id = A.add_state();
        ids[s] = id;
        work.push_back(s);
        return id;
    };

    SState init{0, spec.initial, 0, {}, false, false};
    A.initial.insert(id_of(init));

    // scan-end acceptance: final flush (reversed) must resolve the surplus
    auto accept_of = [&](const SState& s) {
        if (s.side == 1 && !s.buf.empty()) return false;
        Str f = B.flushes[s.q];
        std::reverse(f.begin(), f.end());
        return f == s.buf;
    };

    std::vector<Ch> ycs(spec.out_alphabet.begin(), spec.out_alphabet.end());

    while (!work.empty()) {
        SState s = work.front();
        work.pop_front();
        int from = ids[s];
        if (accept_of(s)) A.accepting.insert(from);

        for (const auto& t : B.tuples) {
            bool t_pad = std::all_of(t.begin(), t.end(), [](Ch c) { return c == kPad; });
            if (t_pad && s.x_started) continue;  // pads occur only at scan start
            int q2 = s.q;
            Str em;
            if (!t_pad) {
                const auto& r = B.rw(s.q, t);
                if (!r) continue;
                q2 = r->first;
                em = r->second;
                std::reverse(em.begin(), em.end());
            }
            // output-track pad: only before the output has started in scan
            // order (i.e. while the output is shorter than the spine)
            if (!s.y_started && !t_pad) {
                int side = s.side;
                Str buf = s.buf;
                if (feed_emission(side, buf, em, B.drift_cap) &&
                    !(side == 0 && !B.behind_ok(q2, buf))) {
                    TupleSymbol sym = t;
                    sym.push_back(kPad);
                    SState n{0, q2, side, buf, true, false};
                    A.add_transition(from, sym, id_of(n));
                }
            }
            for (Ch yc : ycs) {
                int side = s.side;
                Str buf = s.buf;
                if (!surplus_claim(side, buf, yc)) continue;
                if (buf.size() > B.drift_cap) continue;
                if (!feed_emission(side, buf, em, B.drift_cap)) continue;
                if (side == 0 && !B.behind_ok(q2, buf)) continue;
                TupleSymbol sym = t;
                sym.push_back(yc);
                SState n{0, q2, side, buf, s.x_started || !t_pad, true};
                A.add_transition(from, sym, id_of(n));
            }
        }
    }
    auto rev = reverse_automaton(A);
    return rev.finish();
}

}  // namespace

rel::Operation build_onepass_op(const std::string& name, const OnePassSpec& spec) {
    if (spec.arity < 1 || static_cast<int>(spec.in_alphabets.size()) != spec.arity)
        throw SpecError("per-track input alphabets must match the arity");
    Builder B(spec);
    TrackAutomaton A =
        spec.direction == OnePassSpec::Dir::L2R ? build_l2r(B) : build_r2l(B);

    rel::Operation op;
    op.name = name;
    op.kind = rel::OpKind::Function;
    op.arity = spec.arity;
    op.growth = spec.bound;
    op.automaton = std::move(A);
    auto rep = rel::validate_relation(op.automaton);
    op.bound = rep.bound;
    auto exact = rel::try_check_functional_op(op);
    if (exact.has_value()) {
        if (!*exact)
            throw std::logic_error("one-pass construction produced a non-functional relation: " +
                                   name);
        op.certificate = rel::Certificate::Checked;
    } else {
        op.certificate = rel::Certificate::Structural;
    }
    return op;
}

rel::AutomaticFunction build_onepass(const OnePassSpec& spec) {
    if (spec.arity != 1) throw SpecError("build_onepass expects a unary pass");
    auto op = build_onepass_op("<onepass>", spec);
    rel::AutomaticFunction f;
    f.relation.automaton = std::move(op.automaton);
    f.relation.bound = op.bound;
    f.functional_certificate = op.certificate;
    f.growth = spec.bound;
    return f;
}

std::optional<Str> interpret_pass(const OnePassSpec& spec, const std::vector<Str>& inputs) {
    if (static_cast<int>(inputs.size()) != spec.arity) throw SpecError("arity mismatch");
    size_t maxin = 0;
    for (const auto& w : inputs) maxin = std::max(maxin, w.size());
    auto tuple_at = [&](size_t p) {
        Str t;
        for (const auto& w : inputs) t.push_back(p < w.size() ? w[p] : kPad);
        return t;
    };
    int q = spec.initial;
    if (spec.direction == OnePassSpec::Dir::L2R) {
        Str y;
        for (size_t p = 0; p < maxin; ++p) {
            auto r = spec.rewrite(q, tuple_at(p));
            if (!r) return std::nullopt;
            q = r->first;
            y += r->second;
        }
        y += spec.flush(q);
        return y;
    }
    Str acc;
    for (size_t p = maxin; p-- > 0;) {
        auto r = spec.rewrite(q, tuple_at(p));
        if (!r) return std::nullopt;
        q = r->first;
        acc = r->second + acc;
    }
    return spec.flush(q) + acc;
}

rel::Operation build_scanner_predicate(const std::string& name, int arity, int n_states,
                                       int initial,
                                       const std::vector<std::set<Ch>>& in_alphabets,
                                       const std::function<int(int, const Str&)>& step,
                                       const std::set<int>& accepting) {
    TrackAutomaton A;
    A.track_count = arity;
    for (const auto& al : in_alphabets)
        for (Ch c : al) A.alphabet.insert(c);
    A.state_count = n_states;
    A.initial.insert(initial);
    for (int s : accepting) A.accepting.insert(s);
    auto tuples = tuple_universe(in_alphabets);
    for (int q = 0; q < n_states; ++q)
        for (const auto& t : tuples) {
            int q2 = step(q, t);
            if (q2 >= 0) A.add_transition(q, t, q2);
        }
    A.finish();
    return rel::op_from_predicate(name, std::move(A));
}

}  // namespace arm::onepass
