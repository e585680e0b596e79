#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "arm/relation.hpp"

namespace arm::onepass {

class SpecError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A single sweep over the convolution of the inputs, reading one position
// per step and emitting 0..2 output characters, plus a final flush. The
// builder synchronizes the sweep against the output track and produces the
// track automaton of its graph; a right-to-left sweep is built on the
// reversed stream and the automaton is reversed afterwards.
struct OnePassSpec {
    enum class Dir { L2R, R2L };
    Dir direction = Dir::L2R;
    int arity = 1;
    int n_states = 1;
    int initial = 0;
    std::vector<std::set<Ch>> in_alphabets;  // per input track, pad excluded
    std::set<Ch> out_alphabet;
    long long bound = 2;  // declared output-length delta / drift cap

    // (state, input tuple with pads for exhausted tracks) -> (state', emission)
    std::function<std::optional<std::pair<int, Str>>(int, const Str&)> rewrite;
    std::function<Str(int)> flush = [](int) { return Str{}; };
};

rel::Operation build_onepass_op(const std::string& name, const OnePassSpec& spec);
rel::AutomaticFunction build_onepass(const OnePassSpec& spec);

// Reference interpreter for the same sweep; the oracle side of the
// construction's equivalence tests. Returns nullopt when a rewrite is missing.
std::optional<Str> interpret_pass(const OnePassSpec& spec, const std::vector<Str>& inputs);

// Deterministic scanner over conv(inputs): an arity-track predicate
// automaton. step returns the successor state or -1 (dead).
rel::Operation build_scanner_predicate(const std::string& name, int arity, int n_states,
                                       int initial,
                                       const std::vector<std::set<Ch>>& in_alphabets,
                                       const std::function<int(int, const Str&)>& step,
                                       const std::set<int>& accepting);

}  // namespace arm::onepass
