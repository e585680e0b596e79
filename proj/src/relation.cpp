#include "arm/relation.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace arm::rel {

using aut::TupleSymbol;

struct Operation::Index {
    std::unordered_map<Ch, int> char_id;  // alphabet ∪ pad → dense id
    int nchars = 0;
    // (state, input char ids) → (output char, next state); pad output = y ended
    std::unordered_map<uint64_t, std::vector<std::pair<Ch, int>>> step;
    // states from which acceptance is reachable using only all-pad inputs
    std::vector<char> tail_live;
    bool single_valued = true;  // every key has exactly one successor

    uint64_t key(int state, const std::vector<int>& in_ids) const {
        uint64_t k = static_cast<uint64_t>(state);
        for (int id : in_ids) k = k * static_cast<uint64_t>(nchars + 1) + (id + 1);
        return k;
    }
};

static std::shared_ptr<Operation::Index> build_index(const Operation& op) {
    auto ix = std::make_shared<Operation::Index>();
    ix->char_id[kPad] = 0;
    int next = 1;
    for (Ch c : op.automaton.alphabet) ix->char_id[c] = next++;
    ix->nchars = next;

    int in_tracks = op.arity;
    for (const auto& t : op.automaton.transitions) {
        std::vector<int> ids(in_tracks);
        for (int i = 0; i < in_tracks; ++i) ids[i] = ix->char_id.at(t.sym[i]);
        auto& v = ix->step[ix->key(t.from, ids)];
        v.push_back({t.sym[in_tracks], t.to});
        if (v.size() > 1) ix->single_valued = false;
    }
    // tail liveness: acceptance reachable via transitions whose input tracks
    // are all pads
    ix->tail_live.assign(op.automaton.state_count, 0);
    std::vector<std::vector<int>> rev(op.automaton.state_count);
    for (const auto& t : op.automaton.transitions) {
        bool pad_in = true;
        for (int i = 0; i < in_tracks; ++i)
            if (t.sym[i] != kPad) pad_in = false;
        if (pad_in) rev[t.to].push_back(t.from);
    }
    std::deque<int> q;
    for (int s : op.automaton.accepting) {
        ix->tail_live[s] = 1;
        q.push_back(s);
    }
    while (!q.empty()) {
        int s = q.front();
        q.pop_front();
        for (int p : rev[s])
            if (!ix->tail_live[p]) {
                ix->tail_live[p] = 1;
                q.push_back(p);
            }
    }
    return ix;
}

static const Operation::Index& index_of(const Operation& op) {
    if (!op.index) op.index = build_index(op);
    return *op.index;
}

namespace {

struct Node {
    int state;
    int parent;  // index into node pool, -1 at roots
    Ch out;      // kPad when no output char was emitted on this edge
};

Str rebuild(const std::vector<Node>& pool, int at) {
    Str y;
    for (int i = at; i >= 0; i = pool[i].parent)
        if (pool[i].out != kPad) y.push_back(pool[i].out);
    std::reverse(y.begin(), y.end());
    return y;
}

}  // namespace

std::vector<Str> enumerate_op(const Operation& op, const std::vector<Str>& inputs, size_t cap,
                              std::optional<size_t> max_out_len) {
    if (static_cast<int>(inputs.size()) != op.arity)
        throw aut::ArityError("operation arity mismatch: " + op.name);
    if (op.kind == OpKind::Predicate)
        throw aut::ArityError("predicate has no outputs: " + op.name);
    const auto& ix = index_of(op);

    size_t maxin = 0;
    for (const auto& w : inputs) maxin = std::max(maxin, w.size());
    size_t limit = max_out_len ? *max_out_len
                               : maxin + static_cast<size_t>(std::max<long long>(op.growth, 0));
    size_t pos_limit = std::max(maxin, limit);

    auto spine_ids = [&](size_t p) {
        std::vector<int> ids(op.arity);
        for (int t = 0; t < op.arity; ++t) {
            Ch c = p < inputs[t].size() ? inputs[t][p] : kPad;
            auto it = ix.char_id.find(c);
            if (it == ix.char_id.end()) return std::vector<int>{};  // outside alphabet
            ids[t] = it->second;
        }
        return ids;
    };

    std::vector<Node> pool;
    // frontier entries: (node index, pos, y_end position or -1 while growing)
    struct Fr {
        int node;
        size_t pos;
        long long y_end;
    };
    std::vector<Fr> stack;
    for (int s : op.automaton.initial) {
        pool.push_back({s, -1, kPad});
        stack.push_back({static_cast<int>(pool.size()) - 1, 0, -1});
    }

    std::vector<Str> results;
    auto maybe_accept = [&](const Fr& f) {
        int st = pool[f.node].state;
        if (!op.automaton.accepting.count(st)) return;
        size_t ylen = f.y_end >= 0 ? static_cast<size_t>(f.y_end) : f.pos;
        if (f.pos < maxin) return;
        if (f.pos != std::max(maxin, ylen)) return;
        results.push_back(rebuild(pool, f.node));
        if (results.size() > cap)
            throw FanoutOverflowError("operation fanout exceeds cap: " + op.name);
    };

    // dedup for certified functions: at most one completion per
    // (state,pos,y_end-state); distinct prefixes reaching the same key have
    // identical continuations, and two surviving ones would witness
    // non-functionality.
    bool dedup = op.kind == OpKind::Function && op.certificate != Certificate::None;
    std::unordered_map<uint64_t, char> seen;

    while (!stack.empty()) {
        Fr f = stack.back();
        stack.pop_back();
        if (dedup) {
            uint64_t k = (static_cast<uint64_t>(pool[f.node].state) * (pos_limit + 2) + f.pos) *
                             2 +
                         (f.y_end >= 0 ? 1 : 0);
            auto ins = seen.insert({k, 1});
            if (!ins.second) continue;
        }
        maybe_accept(f);
        if (f.pos >= pos_limit) continue;
        auto ids = spine_ids(f.pos);
        if (op.arity > 0 && ids.empty() && f.pos < maxin) continue;  // char outside alphabet
        auto it = ix.step.find(ix.key(pool[f.node].state, ids));
        if (it == ix.step.end()) continue;
        bool input_done = f.pos >= maxin;
        for (auto& [out, to] : it->second) {
            long long y_end = f.y_end;
            if (out == kPad) {
                if (y_end < 0) y_end = static_cast<long long>(f.pos);
                if (input_done) continue;  // all-pad tuple cannot occur
            } else {
                if (y_end >= 0) continue;  // output resumed after ending
                if (f.pos + 1 > limit) continue;
            }
            if (input_done && !ix.tail_live[to]) continue;
            pool.push_back({to, f.node, out == kPad ? kPad : out});
            stack.push_back({static_cast<int>(pool.size()) - 1, f.pos + 1, y_end});
        }
    }
    std::sort(results.begin(), results.end());
    results.erase(std::unique(results.begin(), results.end()), results.end());
    if (results.size() > cap) throw FanoutOverflowError("operation fanout exceeds cap: " + op.name);
    return results;
}

std::optional<Str> eval_op(const Operation& op, const std::vector<Str>& inputs) {
    if (op.kind == OpKind::Function && op.certificate == Certificate::None)
        throw UncertifiedFunctionError("function lacks a functional certificate: " + op.name);
    auto out = enumerate_op(op, inputs, 2);
    if (out.empty()) return std::nullopt;
    if (out.size() > 1)
        throw std::logic_error("certified function produced two outputs: " + op.name);
    return out[0];
}

bool test_predicate(const Operation& op, const std::vector<Str>& inputs) {
    if (static_cast<int>(inputs.size()) != op.arity)
        throw aut::ArityError("predicate arity mismatch: " + op.name);
    return op.automaton.accepts_words(inputs);
}

std::optional<Str> eval_function(const AutomaticFunction& f, const Str& input) {
    if (f.functional_certificate == Certificate::None)
        throw UncertifiedFunctionError("eval_function on uncertified function");
    Operation op;
    op.name = "<anonymous>";
    op.kind = OpKind::Function;
    op.arity = 1;
    op.automaton = f.relation.automaton;
    op.growth = f.growth;
    op.certificate = f.functional_certificate;
    return eval_op(op, {input});
}

std::vector<Str> enumerate_outputs(const AutomaticRelation& r, const Str& input, size_t cap) {
    if (r.bound == kUnbounded)
        throw UnboundedCompositionError("enumerate_outputs requires a finite bound");
    Operation op;
    op.name = "<relation>";
    op.kind = OpKind::Relation;
    op.arity = 1;
    op.automaton = r.automaton;
    op.growth = r.bound;
    return enumerate_op(op, {input}, cap);
}

// --- validators ---

ValidationReport validate_relation(const TrackAutomaton& a) {
    ValidationReport rep;
    // wellformedness: no accepted word drives the universe tracker into the
    // malformed sink
    {
        int k = a.track_count;
        auto idx = a.by_state();
        // universe tracker state: pad mask, or -1 = sink
        auto step_mask = [&](int m, const TupleSymbol& sym) -> int {
            if (m < 0) return -1;
            int m2 = 0;
            for (int i = 0; i < k; ++i) {
                bool pad = sym[i] == kPad;
                if (((m >> i) & 1) && !pad) return -1;
                if (pad) m2 |= 1 << i;
            }
            return m2;
        };
        std::set<std::pair<int, int>> vis;
        std::deque<std::pair<int, int>> q;
        bool bad = false;
        for (int s : a.initial) {
            q.push_back({s, 0});
            vis.insert({s, 0});
        }
        while (!q.empty() && !bad) {
            auto [s, m] = q.front();
            q.pop_front();
            if (m < 0 && a.accepting.count(s)) {
                bad = true;
                break;
            }
            for (auto& [sym, to] : idx[s]) {
                int m2 = step_mask(m, sym);
                if (vis.insert({to, m2}).second) q.push_back({to, m2});
            }
        }
        rep.wellformed = !bad;
    }
    // bound via SCC condensation, counting pad-bearing edges
    {
        int n = a.state_count;
        if (n == 0 || a.empty_language()) {
            rep.bound = 0;
            return rep;
        }
        // Tarjan SCC
        std::vector<int> comp(n, -1), low(n, 0), num(n, -1), stk;
        std::vector<char> on(n, 0);
        int counter = 0, ncomp = 0;
        auto idx = a.by_state();
        std::vector<std::tuple<int, size_t>> call;
        for (int root = 0; root < n; ++root) {
            if (num[root] >= 0) continue;
            call.push_back({root, 0});
            num[root] = low[root] = counter++;
            stk.push_back(root);
            on[root] = 1;
            while (!call.empty()) {
                auto& [v, ei] = call.back();
                if (ei < idx[v].size()) {
                    int w = idx[v][ei].second;
                    ++ei;
                    if (num[w] < 0) {
                        num[w] = low[w] = counter++;
                        stk.push_back(w);
                        on[w] = 1;
                        call.push_back({w, 0});
                    } else if (on[w]) {
                        low[v] = std::min(low[v], num[w]);
                    }
                } else {
                    if (low[v] == num[v]) {
                        while (true) {
                            int w = stk.back();
                            stk.pop_back();
                            on[w] = 0;
                            comp[w] = ncomp;
                            if (w == v) break;
                        }
                        ++ncomp;
                    }
                    int v_done = v;
                    call.pop_back();
                    if (!call.empty()) {
                        int p = std::get<0>(call.back());
                        low[p] = std::min(low[p], low[v_done]);
                    }
                }
            }
        }
        auto has_pad = [](const TupleSymbol& sym) {
            for (Ch c : sym)
                if (c == kPad) return true;
            return false;
        };
        bool infinite = false;
        std::vector<std::vector<std::pair<int, int>>> cedges(ncomp);  // (to, weight)
        for (const auto& t : a.transitions) {
            int w = has_pad(t.sym) ? 1 : 0;
            if (comp[t.from] == comp[t.to]) {
                if (w) infinite = true;
            } else {
                cedges[comp[t.from]].push_back({comp[t.to], w});
            }
        }
        if (infinite) {
            rep.bound = kUnbounded;
            return rep;
        }
        // Tarjan numbers components in reverse topological order.
        std::vector<long long> best(ncomp, std::numeric_limits<long long>::min());
        for (int s : a.initial) best[comp[s]] = 0;
        for (int c = ncomp - 1; c >= 0; --c) {
            if (best[c] == std::numeric_limits<long long>::min()) continue;
            for (auto& [to, w] : cedges[c]) best[to] = std::max(best[to], best[c] + w);
        }
        long long ans = 0;
        for (int s = 0; s < n; ++s)
            if (best[comp[s]] != std::numeric_limits<long long>::min())
                ans = std::max(ans, best[comp[s]]);
        rep.bound = ans;
    }
    return rep;
}

bool check_functional(const AutomaticRelation& r) {
    const auto& a = r.automaton;
    if (a.track_count != 2) throw aut::ArityError("check_functional needs a binary relation");
    if (a.empty_language()) return true;
    const auto& sigma = a.alphabet;
    // conv(x, y, y') with both pairs accepted and y != y'
    auto left = aut::embed(a, 3, {0, 1}, sigma);
    auto right = aut::embed(a, 3, {0, 2}, sigma);
    auto both = aut::intersect(left, right);
    // differ automaton: some position where tracks 1 and 2 differ
    aut::TrackAutomaton differ;
    differ.track_count = 3;
    differ.alphabet = sigma;
    int eq = differ.add_state();
    int ne = differ.add_state();
    differ.initial.insert(eq);
    differ.accepting.insert(ne);
    std::vector<Ch> chars(sigma.begin(), sigma.end());
    chars.push_back(kPad);
    for (Ch c0 : chars)
        for (Ch c1 : chars)
            for (Ch c2 : chars) {
                if (c0 == kPad && c1 == kPad && c2 == kPad) continue;
                TupleSymbol t{c0, c1, c2};
                differ.add_transition(eq, t, c1 == c2 ? eq : ne);
                differ.add_transition(ne, t, ne);
            }
    differ.finish();
    auto bad = aut::intersect(both, differ);
    bad = aut::intersect(bad, aut::wellformed_universe(3, sigma));
    return bad.empty_language();
}

AutomaticRelation compose(const AutomaticRelation& r, const AutomaticRelation& s) {
    if (r.bound == kUnbounded || s.bound == kUnbounded)
        throw UnboundedCompositionError("composition with unbounded relations is refused");
    std::set<Ch> sigma = r.automaton.alphabet;
    for (Ch c : s.automaton.alphabet) sigma.insert(c);
    auto ra = r.automaton;
    ra.alphabet = sigma;
    auto sa = s.automaton;
    sa.alphabet = sigma;
    auto left = aut::embed(ra, 3, {0, 1}, sigma);
    auto right = aut::embed(sa, 3, {1, 2}, sigma);
    auto prod = aut::intersect(left, right);
    prod = aut::intersect(prod, aut::wellformed_universe(3, sigma));
    AutomaticRelation out;
    out.automaton = aut::project(prod, {0, 2});
    out.bound = r.bound + s.bound;
    return out;
}

TrackAutomaton image_of(const Operation& op, const TrackAutomaton& s) {
    if (op.arity != 1 || op.kind == OpKind::Predicate)
        throw aut::ArityError("image_of needs a unary map operation");
    if (s.track_count != 1) throw aut::ArityError("image_of needs a 1-track set");
    // Synchronized product: S consumes the input track until it is padded,
    // op consumes both tracks. Tuples whose output entry is the pad project
    // to epsilon edges, eliminated at the end.
    const auto& A = op.automaton;
    std::map<std::pair<int, int>, int> ids;  // (op state, s state; -1 = s done)
    struct Edge {
        int from, to;
        Ch out;  // kPad = epsilon
    };
    std::vector<Edge> edges;
    std::vector<std::pair<int, int>> nodes;
    std::deque<int> q;
    auto sid = [&](int x, int y) {
        auto it = ids.find({x, y});
        if (it != ids.end()) return it->second;
        int id = static_cast<int>(nodes.size());
        ids[{x, y}] = id;
        nodes.push_back({x, y});
        q.push_back(id);
        return id;
    };
    auto sa = s.by_state();
    std::vector<char> s_acc(s.state_count, 0);
    for (int x : s.accepting) s_acc[x] = 1;

    std::set<int> init;
    for (int x : A.initial)
        for (int y : s.initial) init.insert(sid(x, y));
    auto ia = A.by_state();
    while (!q.empty()) {
        int from = q.front();
        q.pop_front();
        auto [x, y] = nodes[from];
        for (auto& [sym, xt] : ia[x]) {
            Ch in = sym[0], outc = sym[1];
            if (in == kPad) {
                // input track finished: S must be accepting (or already done)
                if (y == -1 || s_acc[y]) edges.push_back({from, sid(xt, -1), outc});
            } else {
                if (y == -1) continue;
                for (auto& [sc, yt] : sa[y])
                    if (sc[0] == in) edges.push_back({from, sid(xt, yt), outc});
            }
        }
    }
    int n = static_cast<int>(nodes.size());
    // epsilon closure over out==kPad edges
    std::vector<std::vector<int>> eps(n);
    for (const auto& e : edges)
        if (e.out == kPad) eps[e.from].push_back(e.to);
    std::vector<std::set<int>> closure(n);
    for (int i = 0; i < n; ++i) {
        std::deque<int> cq{i};
        closure[i].insert(i);
        while (!cq.empty()) {
            int v = cq.front();
            cq.pop_front();
            for (int w : eps[v])
                if (closure[i].insert(w).second) cq.push_back(w);
        }
    }
    auto node_accepting = [&](int i) {
        auto [x, y] = nodes[i];
        return A.accepting.count(x) && (y == -1 || s_acc[y]);
    };
    TrackAutomaton out;
    out.track_count = 1;
    out.alphabet = A.alphabet;
    out.state_count = n;
    for (int i : init) out.initial.insert(i);
    for (int i = 0; i < n; ++i)
        for (int c : closure[i])
            if (node_accepting(c)) {
                out.accepting.insert(i);
                break;
            }
    std::vector<std::vector<const Edge*>> loud(n);
    for (const auto& e : edges)
        if (e.out != kPad) loud[e.from].push_back(&e);
    for (int i = 0; i < n; ++i) {
        std::set<std::pair<Ch, int>> added;
        for (int c : closure[i])
            for (const Edge* e : loud[c])
                if (added.insert({e->out, e->to}).second)
                    out.add_transition(i, TupleSymbol{e->out}, e->to);
    }
    return out.finish();
}

TrackAutomaton restrict_by_predicate(const Operation& pred, const TrackAutomaton& s,
                                     bool positive) {
    if (pred.kind != OpKind::Predicate || pred.arity != 1)
        throw aut::ArityError("restrict_by_predicate needs a unary predicate");
    std::set<Ch> sigma = s.alphabet;
    for (Ch c : pred.automaton.alphabet) sigma.insert(c);
    auto p = pred.automaton;
    p.alphabet = sigma;
    if (!positive) p = aut::complement(p);
    auto s2 = s;
    s2.alphabet = sigma;
    return aut::determinize_minimize(aut::intersect(s2, p));
}

Operation op_from_relation(std::string name, AutomaticRelation r, OpKind kind) {
    Operation op;
    op.name = std::move(name);
    op.kind = kind;
    op.arity = r.automaton.track_count - 1;
    op.growth = r.bound == kUnbounded ? 4 : r.bound;
    op.bound = r.bound;
    op.automaton = std::move(r.automaton);
    return op;
}

Operation op_from_predicate(std::string name, TrackAutomaton a) {
    Operation op;
    op.name = std::move(name);
    op.kind = OpKind::Predicate;
    op.arity = a.track_count;
    op.automaton = std::move(a);
    return op;
}

std::optional<bool> try_check_functional_op(const Operation& op, double ceiling) {
    if (op.arity != 1) return std::nullopt;
    double est = static_cast<double>(op.automaton.transitions.size()) *
                 (static_cast<double>(op.automaton.alphabet.size()) + 1);
    if (est * est > ceiling) return std::nullopt;
    AutomaticRelation r;
    r.automaton = op.automaton;
    r.bound = op.bound;
    return check_functional(r);
}

}  // namespace arm::rel
