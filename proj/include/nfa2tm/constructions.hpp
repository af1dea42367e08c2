#pragma once

// The conversions from finite automata to restricted one-tape deterministic
// Turing machines, as machine-producing functions:
//
//   build_update_machine     table-update machine for one symbol
//   build_2nfa_to_wrdtm      2NFA -> halting weight-reducing DTM
//   build_2nfa_to_wrdhm_long 2NFA -> WR Hennie machine, long inputs
//   build_unary_2nfa_to_wrdhm unary 2NFA -> WR Hennie machine, all inputs
//   build_2nfa_to_dhm        2NFA -> Hennie machine, all inputs
//   build_1nfa_to_wrdhm_long 1NFA -> WR Hennie machine, long inputs
//   build_1nfa_to_dhm        1NFA -> Hennie machine, all inputs

#include "nfa2tm/automata.hpp"
#include "nfa2tm/machine_builder.hpp"

namespace nfa2tm {

// Halting end-marked machine that, on a tape holding the n + n^2 bit
// encoding of (gamma_z, tau_z), halts with the tape holding the encoding of
// (gamma_z.sigma, tau_z.sigma). sigma_ext is an input symbol or the right
// endmarker of `a`.
OneTapeDtm build_update_machine(const TwoWayNfa& a, Symbol sigma_ext);

struct ConstructionResult {
    OneTapeDtm machine;
    // Countdown bound fed to the weight-reducing pass (0 when the output is
    // not graded).
    uint64_t visit_bound = 0;
    // Agreement with the source automaton is guaranteed for |w| >= this.
    uint64_t guarantee_min_len = 0;
};

ConstructionResult build_2nfa_to_wrdtm(const TwoWayNfa& a, bool skip_wr_pass = false);
ConstructionResult build_2nfa_to_wrdhm_long(const TwoWayNfa& a, bool skip_wr_pass = false);
ConstructionResult build_unary_2nfa_to_wrdhm(const TwoWayNfa& a, bool skip_wr_pass = false);
ConstructionResult build_2nfa_to_dhm(const TwoWayNfa& a);
ConstructionResult build_1nfa_to_wrdhm_long(const OneWayNfa& a, bool skip_wr_pass = false);
ConstructionResult build_1nfa_to_dhm(const OneWayNfa& a);

// Builds the construction named on the CLI (`2nfa-wrdtm`, `2nfa-wrdhm-long`,
// `u2nfa-wrdhm`, `2nfa-dhm` on two-way inputs; `1nfa-wrdhm-long`, `1nfa-dhm`
// on one-way inputs).
bool construction_takes_2nfa(const std::string& name);
ConstructionResult build_named_2nfa(const std::string& name, const TwoWayNfa& a,
                                    bool skip_wr_pass);
ConstructionResult build_named_1nfa(const std::string& name, const OneWayNfa& a,
                                    bool skip_wr_pass);

// Reference implementation of the bounded-reachability recursion over the
// configuration graph of `a` on w: is there a path from (p,i) to (q,j) of
// length at most t? Positions range over 0..|w|+2, with |w|+2 the exit
// node. Used as the oracle for the middle regime of build_2nfa_to_dhm.
bool reachable_fn(const TwoWayNfa& a, const Word& w, State p, uint32_t i, State q, uint32_t j,
                  uint64_t t);

// One-way variant: is there a path from (p,i) to (q,j) of length exactly
// j-i in the one-way configuration graph (positions = symbols consumed)?
bool reachable_one_way_fn(const OneWayNfa& a, const Word& w, State p, uint32_t i, State q,
                          uint32_t j);

// Independent BFS oracles for the two recursions.
bool config_reachable_bfs(const TwoWayNfa& a, const Word& w, State p, uint32_t i, State q,
                          uint32_t j, uint64_t t);

// Final-state normalization: reroutes every accepting exit on the right
// endmarker through one fresh final state (two-way), or adds a fresh final
// state entered wherever a final state was (one-way). Language preserved;
// for the one-way case words of length 0 must be special-cased by callers.
TwoWayNfa normalize_single_final(const TwoWayNfa& a);
OneWayNfa normalize_single_final(const OneWayNfa& a);

}  // namespace nfa2tm
