#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "arm/automaton.hpp"
#include "arm/relation.hpp"

using namespace arm;
using namespace arm::aut;

namespace {

const std::set<Ch> kBin{U'0', U'1'};

// k-track automaton from a membership lambda, built by exhaustive
// enumeration up to a length (test scaffolding only).
TrackAutomaton word_aut(int k, const std::set<Ch>& sigma,
                        const std::function<bool(const std::vector<Str>&)>& member,
                        size_t max_len) {
    TrackAutomaton a;
    a.track_count = k;
    a.alphabet = sigma;
    struct Node {
        std::map<TupleSymbol, int> next;
        bool acc = false;
    };
    std::vector<Node> trie(1);
    for (const auto& w : all_tuple_strings(k, sigma, max_len)) {
        bool wf = true;
        std::vector<Str> words;
        try {
            words = deconvolve(w);
        } catch (...) {
            wf = false;
        }
        if (!wf) continue;
        int cur = 0;
        for (const auto& sym : w) {
            auto it = trie[cur].next.find(sym);
            if (it == trie[cur].next.end()) {
                trie.push_back({});
                it = trie[cur].next.insert({sym, static_cast<int>(trie.size()) - 1}).first;
            }
            cur = it->second;
        }
        if (w.empty()) {
            std::vector<Str> empties(k);
            if (member(empties)) trie[cur].acc = true;
        } else if (member(words)) {
            trie[cur].acc = true;
        }
    }
    a.state_count = static_cast<int>(trie.size());
    a.initial.insert(0);
    for (int i = 0; i < a.state_count; ++i) {
        if (trie[i].acc) a.accepting.insert(i);
        for (auto& [sym, to] : trie[i].next) a.add_transition(i, sym, to);
    }
    return a.finish();
}

Str u(const char* s) { return to_u32(s); }

// identity relation over {0,1}
TrackAutomaton identity_rel() {
    TrackAutomaton a;
    a.track_count = 2;
    a.alphabet = kBin;
    int s = a.add_state();
    a.initial.insert(s);
    a.accepting.insert(s);
    for (Ch c : kBin) a.add_transition(s, TupleSymbol{c, c}, s);
    return a.finish();
}

// relation appending one '0': y = x0
TrackAutomaton append0_rel() {
    TrackAutomaton a;
    a.track_count = 2;
    a.alphabet = kBin;
    int s = a.add_state(), t = a.add_state();
    a.initial.insert(s);
    a.accepting.insert(t);
    for (Ch c : kBin) a.add_transition(s, TupleSymbol{c, c}, s);
    a.add_transition(s, TupleSymbol{kPad, U'0'}, t);
    return a.finish();
}

}  // namespace

TEST_CASE("convolve basics") {
    auto c = convolve({u("ab"), u("a")});
    REQUIRE(c.size() == 2);
    CHECK(c[0] == TupleSymbol{U'a', U'a'});
    CHECK(c[1] == TupleSymbol{U'b', kPad});

    auto c2 = convolve({u("x"), u("x")});
    REQUIRE(c2.size() == 1);
    CHECK(c2[0] == TupleSymbol{U'x', U'x'});

    auto c3 = convolve({u(""), u("01")});
    REQUIRE(c3.size() == 2);
    CHECK(c3[0] == TupleSymbol{kPad, U'0'});
    CHECK(c3[1] == TupleSymbol{kPad, U'1'});

    CHECK_THROWS_AS(convolve({}), ArityError);
    CHECK_THROWS_AS(convolve({u("a#")}), AlphabetError);
}

TEST_CASE("deconvolve basics and errors") {
    auto ws = deconvolve({{U'a', U'a'}, {U'b', kPad}});
    CHECK(ws == std::vector<Str>{u("ab"), u("a")});
    CHECK(deconvolve({{U'x', U'x'}}) == std::vector<Str>{u("x"), u("x")});
    CHECK_THROWS_AS(deconvolve({{U'a', kPad}, {kPad, U'b'}}), AlphabetError);
}

TEST_CASE("round trip property") {
    std::mt19937 rng(7);
    for (int it = 0; it < 300; ++it) {
        int k = 1 + static_cast<int>(rng() % 3);
        std::vector<Str> ws(k);
        for (auto& w : ws) {
            size_t len = rng() % 33;
            for (size_t i = 0; i < len; ++i) w.push_back(rng() % 2 ? U'1' : U'0');
        }
        bool all_empty = true;
        for (auto& w : ws)
            if (!w.empty()) all_empty = false;
        if (all_empty) continue;  // deconvolve can't recover the track count
        CHECK(deconvolve(convolve(ws)) == ws);
    }
}

TEST_CASE("boolean_combine against exhaustive membership") {
    auto first_zero = word_aut(2, kBin,
                               [](const std::vector<Str>& ws) {
                                   for (Ch c : ws[0])
                                       if (c != U'0') return false;
                                   return true;
                               },
                               4);
    auto equal = identity_rel();

    auto both = boolean_combine(first_zero, &equal, BoolMode::Intersect);
    // accepts exactly conv(0^n, 0^n): checked against direct membership
    for (const auto& w : all_tuple_strings(2, kBin, 8)) {
        bool expect = true;
        for (const auto& sym : w)
            if (sym != TupleSymbol{U'0', U'0'}) expect = false;
        // the first-zero automaton was built only up to length 4
        if (w.size() > 4) expect = false;
        CHECK(both.accepts_tuples(w) == expect);
    }

    auto comp = boolean_combine(equal, nullptr, BoolMode::Complement);
    auto inter = boolean_combine(equal, &comp, BoolMode::Intersect);
    CHECK(inter.empty_language());

    auto uu = boolean_combine(equal, &equal, BoolMode::Union);
    CHECK(language_equal_upto(uu, equal, 5));

    TrackAutomaton wrong;
    wrong.track_count = 1;
    wrong.alphabet = kBin;
    wrong.finish();
    CHECK_THROWS_AS(boolean_combine(first_zero, &wrong, BoolMode::Union), ArityError);
}

TEST_CASE("complement is relative to well-formed convolutions") {
    auto equal = identity_rel();
    auto comp = complement(equal);
    CHECK(comp.accepts_tuples({{U'0', kPad}}));                 // x="0", y=""
    CHECK(!comp.accepts_tuples({{kPad, U'0'}, {U'0', kPad}}));  // malformed
    CHECK(!comp.accepts_tuples({{U'0', U'0'}}));
    CHECK(comp.accepts_tuples({{U'0', U'1'}}));
}

TEST_CASE("determinize_minimize preserves language") {
    // 2-state NFA for "contains (0,0)"
    TrackAutomaton nfa;
    nfa.track_count = 2;
    nfa.alphabet = kBin;
    int s0 = nfa.add_state(), s1 = nfa.add_state();
    nfa.initial.insert(s0);
    nfa.accepting.insert(s1);
    std::vector<Ch> cs{U'0', U'1', kPad};
    for (Ch a : cs)
        for (Ch b : cs) {
            if (a == kPad && b == kPad) continue;
            nfa.add_transition(s0, TupleSymbol{a, b}, s0);
            nfa.add_transition(s1, TupleSymbol{a, b}, s1);
        }
    nfa.add_transition(s0, TupleSymbol{U'0', U'0'}, s1);
    nfa.finish();

    auto dfa = determinize_minimize(nfa);
    CHECK(dfa.deterministic_flag);
    CHECK(language_equal_upto(nfa, dfa, 5));

    auto again = determinize_minimize(dfa);
    CHECK(again.state_count == dfa.state_count);

    // empty language trims to nothing
    TrackAutomaton dead;
    dead.track_count = 1;
    dead.alphabet = kBin;
    int d0 = dead.add_state(), d1 = dead.add_state();
    dead.initial.insert(d0);
    dead.add_transition(d0, TupleSymbol{U'0'}, d1);
    dead.finish();
    auto m = determinize_minimize(dead);
    CHECK(m.state_count == 0);
    CHECK(m.empty_language());
}

TEST_CASE("project") {
    auto equal = identity_rel();
    auto star = project(equal, {0});
    for (const auto& w : all_tuple_strings(1, kBin, 5)) CHECK(star.accepts_tuples(w));

    auto app = append0_rel();
    auto ends0 = project(app, {1});
    for (const auto& w : all_tuple_strings(1, kBin, 8)) {
        bool expect = !w.empty() && w.back()[0] == U'0';
        CHECK(ends0.accepts_tuples(w) == expect);
    }

    TrackAutomaton dead;
    dead.track_count = 2;
    dead.alphabet = kBin;
    dead.finish();
    CHECK(project(dead, {0}).empty_language());
    CHECK_THROWS_AS(project(equal, {}), ArityError);
}

TEST_CASE("validate_relation bounds") {
    using namespace arm::rel;
    auto app = append0_rel();
    auto rep = validate_relation(app);
    CHECK(rep.wellformed);
    CHECK(rep.bound == 1);

    // {(x,y): y in 0*, any x} has a pad-bearing cycle
    TrackAutomaton anyzero;
    anyzero.track_count = 2;
    anyzero.alphabet = kBin;
    int s = anyzero.add_state();
    anyzero.initial.insert(s);
    anyzero.accepting.insert(s);
    for (Ch a : std::vector<Ch>{U'0', U'1', kPad})
        for (Ch b : std::vector<Ch>{U'0', kPad}) {
            if (a == kPad && b == kPad) continue;
            anyzero.add_transition(s, TupleSymbol{a, b}, s);
        }
    anyzero.finish();
    auto rep2 = validate_relation(anyzero);
    CHECK(rep2.wellformed);
    CHECK(rep2.bound == kUnbounded);

    TrackAutomaton bad;
    bad.track_count = 2;
    bad.alphabet = kBin;
    int b0 = bad.add_state(), b1 = bad.add_state(), b2 = bad.add_state();
    bad.initial.insert(b0);
    bad.accepting.insert(b2);
    bad.add_transition(b0, TupleSymbol{kPad, U'0'}, b1);
    bad.add_transition(b1, TupleSymbol{U'0', kPad}, b2);
    bad.finish();
    CHECK(!validate_relation(bad).wellformed);
}

TEST_CASE("check_functional") {
    using namespace arm::rel;
    AutomaticRelation id{identity_rel(), 0};
    CHECK(check_functional(id));

    AutomaticRelation samelen;
    {
        TrackAutomaton a;
        a.track_count = 2;
        a.alphabet = kBin;
        int s = a.add_state();
        a.initial.insert(s);
        a.accepting.insert(s);
        for (Ch c1 : kBin)
            for (Ch c2 : kBin) a.add_transition(s, TupleSymbol{c1, c2}, s);
        a.finish();
        samelen = {a, 0};
    }
    CHECK(!check_functional(samelen));
}

TEST_CASE("compose") {
    using namespace arm::rel;
    AutomaticRelation app{append0_rel(), 1};
    auto twice = compose(app, app);
    CHECK(twice.bound == 2);
    for (int len = 0; len <= 6; ++len) {
        std::mt19937 rng(len);
        Str x;
        for (int i = 0; i < len; ++i) x.push_back(rng() % 2 ? U'1' : U'0');
        Str y = x + u("00");
        CHECK(twice.automaton.accepts_words({x, y}));
        CHECK(!twice.automaton.accepts_words({x, x + u("0")}));
    }
    AutomaticRelation id{identity_rel(), 0};
    auto same = compose(app, id);
    CHECK(language_equal_upto(same.automaton, app.automaton, 5));

    AutomaticRelation unb{identity_rel(), kUnbounded};
    CHECK_THROWS_AS(compose(unb, id), UnboundedCompositionError);
}

TEST_CASE("enumerate_outputs and eval") {
    using namespace arm::rel;
    AutomaticRelation id{identity_rel(), 0};
    auto outs = enumerate_outputs(id, u("ab"), 16);
    CHECK(outs.empty());  // outside the alphabet: no outputs
    outs = enumerate_outputs(id, u("01"), 16);
    CHECK(outs == std::vector<Str>{u("01")});

    // replace last char by 0 or 1
    TrackAutomaton rl;
    rl.track_count = 2;
    rl.alphabet = kBin;
    int s = rl.add_state(), t = rl.add_state();
    rl.initial.insert(s);
    rl.accepting.insert(t);
    for (Ch c : kBin) {
        rl.add_transition(s, TupleSymbol{c, c}, s);
        for (Ch d : kBin) rl.add_transition(s, TupleSymbol{c, d}, t);
    }
    rl.finish();
    AutomaticRelation r{rl, 0};
    CHECK(enumerate_outputs(r, u("x"), 8).empty());
    auto two = enumerate_outputs(r, u("0"), 8);
    CHECK(two == std::vector<Str>{u("0"), u("1")});
    CHECK_THROWS_AS(enumerate_outputs(r, u("0"), 1), FanoutOverflowError);

    AutomaticFunction f{{identity_rel(), 0}, Certificate::Checked, 0};
    CHECK(eval_function(f, u("")) == u(""));
    CHECK(eval_function(f, u("0110")) == u("0110"));
    AutomaticFunction unc{{identity_rel(), 0}, Certificate::None, 0};
    CHECK_THROWS_AS(eval_function(unc, u("0")), UncertifiedFunctionError);
}

TEST_CASE("image_of computes exact relation images") {
    using namespace arm::rel;
    auto op = op_from_relation("append0", {append0_rel(), 1}, OpKind::Relation);
    auto set = literal_automaton(convolve({u("10")}), 1, kBin);
    auto img = image_of(op, set);
    CHECK(img.accepts_words({u("100")}));
    CHECK(!img.accepts_words({u("10")}));
    CHECK(!img.accepts_words({u("1000")}));
}
