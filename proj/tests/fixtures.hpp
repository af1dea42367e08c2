#pragma once

// Shared hand-built automata for the test suites.

#include "nfa2tm/automata.hpp"

namespace nfa2tm::fixtures {

// Single state, every symbol (endmarkers included) moves right; the state is
// final, so every word is accepted by exiting past the right endmarker.
inline TwoWayNfa always_right() {
    TwoWayNfa a(1, Alphabet::ab(), 0, {0});
    for (Symbol s = 0; s < a.num_ext_syms(); ++s) {
        if (s == a.rend()) {
            a.add_transition(0, s, 0, Dir::R);  // exit into the final state
        } else {
            a.add_transition(0, s, 0, Dir::R);
        }
    }
    return a;
}

// No move from the initial configuration: rejects everything.
inline TwoWayNfa stuck_at_lend() {
    TwoWayNfa a(2, Alphabet::ab(), 0, {1});
    a.add_transition(1, a.rend(), 1, Dir::R);
    return a;
}

// Fixed three-state 2NFA used across the suites: s0 scans right, an 'a'
// hands over to s1, a 'b' in s1 either backs up to s0 or advances to s2,
// and s2 runs to the right endmarker and exits.
inline TwoWayNfa three_state() {
    TwoWayNfa a(3, Alphabet::ab(), 0, {2});
    Symbol sa = 0, sb = 1;
    a.add_transition(0, a.lend(), 0, Dir::R);
    a.add_transition(0, sa, 1, Dir::R);
    a.add_transition(0, sb, 0, Dir::R);
    a.add_transition(1, sa, 1, Dir::R);
    a.add_transition(1, sb, 0, Dir::L);
    a.add_transition(1, sb, 2, Dir::R);
    a.add_transition(2, sa, 2, Dir::R);
    a.add_transition(2, sb, 2, Dir::R);
    a.add_transition(2, a.rend(), 2, Dir::R);
    return a;
}

// Canonical (k+1)-state 1NFA for "the k-th symbol from the end is 'a'".
inline OneWayNfa kth_from_end(uint32_t k) {
    OneWayNfa a(k + 1, Alphabet::ab(), 0, {k});
    Symbol sa = 0, sb = 1;
    a.add_transition(0, sa, 0);
    a.add_transition(0, sb, 0);
    a.add_transition(0, sa, 1);
    for (uint32_t i = 1; i < k; ++i) {
        a.add_transition(i, sa, i + 1);
        a.add_transition(i, sb, i + 1);
    }
    return a;
}

inline bool kth_from_end_pred(const Word& w, uint32_t k) {
    return w.size() >= k && w[w.size() - k] == 0;
}

}  // namespace nfa2tm::fixtures
