#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "arm/automaton.hpp"

namespace arm::rel {

using aut::TrackAutomaton;

inline constexpr long long kUnbounded = -1;

// A binary automatic relation: 2-track automaton (input track, output
// track) plus its length-difference bound (kUnbounded for none).
struct AutomaticRelation {
    TrackAutomaton automaton;
    long long bound = kUnbounded;
};

enum class Certificate { None, Checked, Structural };

// Functional relation with a one-sided growth bound: |f(x)| <= |x| + growth.
// Outputs may be arbitrarily shorter than inputs (the truncation passes of
// the padded machines rely on this), so the two-sided bound can be infinite
// while the function is still a legal deterministic-machine operation.
struct AutomaticFunction {
    AutomaticRelation relation;
    Certificate functional_certificate = Certificate::None;
    long long growth = 0;
};

enum class OpKind { Function, Relation, Predicate };

// A machine operation of arbitrary arity. Functions/relations use an
// (arity+1)-track automaton over conv(inputs..., output); predicates use an
// arity-track automaton tested for membership.
struct Operation {
    std::string name;
    OpKind kind = OpKind::Function;
    int arity = 1;
    TrackAutomaton automaton;
    long long growth = 0;        // output growth cap (Function/Relation)
    long long bound = 0;         // two-sided bound for Relation (kUnbounded allowed)
    Certificate certificate = Certificate::None;

    // lazily built evaluation index
    struct Index;
    mutable std::shared_ptr<Index> index;
};

class UncertifiedFunctionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class FanoutOverflowError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class UnboundedCompositionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ValidationReport {
    bool wellformed = false;
    long long bound = kUnbounded;  // kUnbounded encodes infinity
};

// --- operation evaluation ---

// All outputs y with conv(inputs..., y) accepted. Lexicographic order.
// Throws FanoutOverflowError when more than cap outputs exist. max_out_len
// caps |y| (default: max input length + growth).
std::vector<Str> enumerate_op(const Operation& op, const std::vector<Str>& inputs, size_t cap,
                              std::optional<size_t> max_out_len = std::nullopt);

// Unique output of a certified function, or nullopt when outside the domain.
std::optional<Str> eval_op(const Operation& op, const std::vector<Str>& inputs);

bool test_predicate(const Operation& op, const std::vector<Str>& inputs);

// --- module-level operations on binary relations ---

std::optional<Str> eval_function(const AutomaticFunction& f, const Str& input);
std::vector<Str> enumerate_outputs(const AutomaticRelation& r, const Str& input,
                                   size_t cap = 4096);

ValidationReport validate_relation(const TrackAutomaton& a);
bool check_functional(const AutomaticRelation& r);
AutomaticRelation compose(const AutomaticRelation& r, const AutomaticRelation& s);

// Language image {y : exists x in S with (x,y) in op} for a unary op; S is
// a 1-track automaton. Exact; used by the symbolic register machinery.
TrackAutomaton image_of(const Operation& op, const TrackAutomaton& s);
// Restriction of S to members satisfying (predicate) / its complement.
TrackAutomaton restrict_by_predicate(const Operation& pred, const TrackAutomaton& s,
                                     bool positive);

Operation op_from_relation(std::string name, AutomaticRelation r, OpKind kind);
Operation op_from_predicate(std::string name, TrackAutomaton a);

// Functional check for an (arity+1)-track operation; exact when small
// enough, otherwise returns nullopt (caller may rely on construction).
std::optional<bool> try_check_functional_op(const Operation& op, double ceiling = 4e6);

}  // namespace arm::rel
