#pragma once

// Finite-automaton data model: one-way and two-way NFAs, the reachability
// table pair (gamma, tau) used by the table-driven simulations, and the
// brute-force acceptance oracles everything else is checked against.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nfa2tm {

using State = uint32_t;
using Symbol = uint32_t;
using Word = std::vector<Symbol>;

enum class Dir : uint8_t { L, R };

inline int dir_delta(Dir d) { return d == Dir::L ? -1 : +1; }

// Input alphabet. Symbol ids follow declaration order; single-character
// names get string helpers for tests and the CLI.
class Alphabet {
public:
    Alphabet() = default;
    explicit Alphabet(std::vector<std::string> names);

    static Alphabet ab() { return Alphabet({"a", "b"}); }
    static Alphabet unary() { return Alphabet({"a"}); }

    uint32_t size() const { return static_cast<uint32_t>(names_.size()); }
    const std::string& name(Symbol s) const { return names_.at(s); }
    const std::vector<std::string>& names() const { return names_; }
    std::optional<Symbol> find(const std::string& name) const;

    bool single_char() const;
    Word word_from_string(const std::string& s) const;
    std::string word_to_string(const Word& w) const;

    bool operator==(const Alphabet&) const = default;

private:
    std::vector<std::string> names_;
};

// A one-way NFA <Q, Sigma, delta, q0, F>. The declaration order of states is
// the bijection Q -> {0..n-1} used by every bit encoding.
class OneWayNfa {
public:
    OneWayNfa(uint32_t num_states, Alphabet alphabet, State initial,
              std::vector<State> finals);

    void add_transition(State from, Symbol sym, State to);

    uint32_t num_states() const { return num_states_; }
    const Alphabet& alphabet() const { return alphabet_; }
    State initial() const { return initial_; }
    bool is_final(State q) const { return (final_mask_ >> q) & 1u; }
    uint32_t final_mask() const { return final_mask_; }
    std::vector<State> finals() const;

    // Bitmask of delta(q, sym).
    uint32_t targets(State q, Symbol sym) const {
        return delta_[q * alphabet_.size() + sym];
    }

    uint64_t size_metric() const;  // card Sigma * card Q^2

private:
    uint32_t num_states_;
    Alphabet alphabet_;
    State initial_;
    uint32_t final_mask_ = 0;
    std::vector<uint32_t> delta_;  // [q * |Sigma| + sym] -> target mask
};

// Extended symbol space of a two-way NFA: input symbols keep their ids,
// followed by the two endmarkers.
struct ExtSym {
    static Symbol lend(const Alphabet& a) { return a.size(); }
    static Symbol rend(const Alphabet& a) { return a.size() + 1; }
};

// A two-way NFA over tape <| w |>. Transitions on the left endmarker must
// move right; transitions on the right endmarker move left unless they enter
// a final state (the accepting exit). Violations are rejected when the
// transition is added.
class TwoWayNfa {
public:
    TwoWayNfa(uint32_t num_states, Alphabet alphabet, State initial,
              std::vector<State> finals);

    void add_transition(State from, Symbol ext_sym, State to, Dir d);

    uint32_t num_states() const { return num_states_; }
    const Alphabet& alphabet() const { return alphabet_; }
    uint32_t num_ext_syms() const { return alphabet_.size() + 2; }
    Symbol lend() const { return alphabet_.size(); }
    Symbol rend() const { return alphabet_.size() + 1; }
    State initial() const { return initial_; }
    bool is_final(State q) const { return (final_mask_ >> q) & 1u; }
    uint32_t final_mask() const { return final_mask_; }
    std::vector<State> finals() const;

    const std::vector<std::pair<State, Dir>>& moves(State q, Symbol ext_sym) const {
        return delta_[q * num_ext_syms() + ext_sym];
    }

    uint64_t size_metric() const;  // card Sigma * card Q^2

private:
    uint32_t num_states_;
    Alphabet alphabet_;
    State initial_;
    uint32_t final_mask_ = 0;
    std::vector<std::vector<std::pair<State, Dir>>> delta_;
};

// The pair (gamma_z, tau_z) for a tape-content prefix z:
//   gamma_z = states reachable from the initial configuration when first
//             leaving z to the right,
//   tau_z   = pairs (p, q) such that entering z's rightmost cell in p can
//             exit z to the right in q without leaving z.
// States are bitmask-encoded following the declaration-order bijection;
// tau is stored row-major by source state.
struct ReachTables {
    uint32_t n = 0;
    uint32_t gamma = 0;
    std::vector<uint32_t> tau_rows;  // tau_rows[p] = mask of q with (p,q) in tau

    bool tau_has(State p, State q) const { return (tau_rows[p] >> q) & 1u; }

    // Bit word u.v with |u| = n and |v| = n^2: u_i = [state i in gamma],
    // v_{i*n+j} = [(i,j) in tau].
    std::vector<uint8_t> to_bits() const;
    static ReachTables from_bits(uint32_t n, const std::vector<uint8_t>& bits);

    bool operator==(const ReachTables&) const = default;
};

// Tape prefix for the table calculus: always starts with the left endmarker,
// then input symbols, optionally closed by the right endmarker.
struct TapePrefix {
    std::vector<Symbol> ext;  // extended symbols; ext.front() must be lend

    static TapePrefix lend_only(const TwoWayNfa& a) { return {{a.lend()}}; }
    static TapePrefix of_word(const TwoWayNfa& a, const Word& w, bool with_rend);
    size_t size() const { return ext.size(); }
};

// Ground-truth acceptance oracle: BFS over the configuration graph of A on
// <| w |>. Accepts iff some path reaches (q_f, |w|+2) with q_f final.
bool accepts_2nfa(const TwoWayNfa& a, const Word& w);

// Subset simulation for one-way NFAs.
bool accepts_1nfa(const OneWayNfa& a, const Word& w);

// Direct BFS computation of (gamma_zX, tau_zX) over partial configurations
// restricted to the segment zX.
ReachTables gamma_tau_oracle(const TwoWayNfa& a, const TapePrefix& zx);

// Result of the Z_p saturation together with the number of passes the
// fixed-point loop took (for the monotonicity property tests).
struct ClosureResult {
    uint32_t set = 0;
    uint32_t passes = 0;
};

// Z_p = states reachable at the rightmost cell of z.sigma from p at that
// cell without leaving the segment; computed as a least fixed point over
// tau_z and the left-moves of sigma.
ClosureResult z_p_closure(const TwoWayNfa& a, const ReachTables& t, Symbol ext_sym,
                          State p);

// Tables for the one-cell prefix "<|" (the base case of the incremental
// computation): the saturation degenerates because the left endmarker admits
// right moves only.
ReachTables tables_for_lend(const TwoWayNfa& a);

// One incremental step: tables for z.sigma from tables for z.
ReachTables update_tables(const TwoWayNfa& a, const ReachTables& t, Symbol ext_sym);

// Folds update_tables over <| w |> and tests F-intersection. Must agree with
// accepts_2nfa on every input.
bool accepts_via_tables(const TwoWayNfa& a, const Word& w);

// Deterministic acceptance trie over all strings of length <= len_max,
// labeled by the accepts_2nfa oracle; behavior on longer strings is a sink.
OneWayNfa short_string_classifier(const TwoWayNfa& a, uint32_t len_max);

// All words of the given length / up to the given length, in lexicographic
// order of symbol ids.
std::vector<Word> all_words_of_length(const Alphabet& a, uint32_t len);
std::vector<Word> all_words_up_to(const Alphabet& a, uint32_t len_max);

}  // namespace nfa2tm
