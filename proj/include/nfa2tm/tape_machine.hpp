#pragma once

// One-tape deterministic Turing machine model, bi-infinite-tape simulator
// with per-cell visit profiling, and static checkers for the end-marked and
// weight-reducing restrictions.
//
// Work symbols are kept in factored form:
//   - a table of *base* symbols (blank, input symbols, endmarkers, track
//     tuples, activation records, ...);
//   - an optional countdown grading: a graded machine's work alphabet is
//     {pristine bases} plus {(b, c) : b writable, c in 0..k-1}, every write
//     replacing count c by c-1 (pristine counts as k). Transitions are
//     count-agnostic, so the table stays base-sized while the virtual
//     alphabet has k copies of each writable symbol;
//   - an optional pair layer produced by tape folding: a cell may hold a
//     pair of base symbols, and every state reads/writes one slot of the
//     pair (its View). The virtual alphabet is then Gamma + Gamma^2.
// Cardinalities reported by size_report refer to the virtual alphabet.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nfa2tm/automata.hpp"

namespace nfa2tm {

constexpr uint32_t kNoBase = 0xffffffffu;
constexpr int32_t kPristine = -1;

enum class BaseKind : uint8_t { Blank, Input, LEnd, REnd, Work };

class SymbolTable {
public:
    SymbolTable();

    uint32_t add(std::string name, BaseKind kind);
    uint32_t add_input(std::string name) { return add(std::move(name), BaseKind::Input); }
    uint32_t add_work(std::string name) { return add(std::move(name), BaseKind::Work); }
    void add_endmarkers();

    uint32_t size() const { return static_cast<uint32_t>(names_.size()); }
    const std::string& name(uint32_t b) const { return names_.at(b); }
    BaseKind kind(uint32_t b) const { return kinds_.at(b); }
    bool is_endmark(uint32_t b) const {
        return kinds_[b] == BaseKind::LEnd || kinds_[b] == BaseKind::REnd;
    }

    uint32_t blank() const { return 0; }
    bool has_endmarkers() const { return lend_ != kNoBase; }
    uint32_t lend() const { return lend_; }
    uint32_t rend() const { return rend_; }

    std::optional<uint32_t> find(const std::string& name) const;
    std::vector<uint32_t> input_bases() const;

private:
    std::vector<std::string> names_;
    std::vector<BaseKind> kinds_;
    std::map<std::string, uint32_t> by_name_;
    uint32_t lend_ = kNoBase;
    uint32_t rend_ = kNoBase;
};

// Which part of a cell a state reads and rewrites. Whole-view states treat
// the cell as an unstructured symbol; slot views address one half of a
// folded pair (slot 2 of an unfolded cell reads as blank and materializes
// the pair on first write).
enum class View : uint8_t { Whole, Slot1, Slot2 };

struct Trans {
    uint32_t next = 0;
    uint32_t write = 0;  // base written into the viewed slot; never blank
    Dir dir = Dir::R;
};

struct Grading {
    uint64_t k = 0;
};

// Tape cell: single base (b2 == kNoBase) or a fold pair. Counts track the
// remaining-visit countdown of each slot; kPristine marks never-written.
struct Cell {
    uint32_t b1 = 0;
    uint32_t b2 = kNoBase;
    int32_t c1 = kPristine;
    int32_t c2 = kPristine;
};

enum class Outcome : uint8_t { Accepted, RejectedHalt, DivergedDetected, BudgetExhausted };

const char* outcome_name(Outcome o);

struct RunResult {
    Outcome outcome = Outcome::RejectedHalt;
    uint64_t steps = 0;
    State final_state = 0;
    // visits[i] = number of steps performed at cell (i + visits_origin);
    // trailing/leading zero cells are trimmed.
    std::vector<uint64_t> visits;
    int64_t visits_origin = 0;
    uint64_t left_extra = 0;   // initially-blank cells written left of the input
    uint64_t right_extra = 0;  // ... right of the input
    // Final non-blank tape contents when capture was requested.
    std::vector<Cell> tape;
    int64_t tape_origin = 0;
    bool accepted() const { return outcome == Outcome::Accepted; }
    uint64_t max_visits() const;
    uint64_t visits_at(int64_t cell) const;
    Cell tape_at(int64_t cell) const;
};

struct SizeReport {
    uint64_t states = 0;
    uint64_t work_symbols = 0;      // virtual cardinality of the work alphabet
    uint64_t base_transitions = 0;  // entries in the factored table
    uint64_t size_metric = 0;       // |Q| * |Gamma| * ceil(log2(|Q| * |Gamma|))
};

// Weight-reducing witness: an explicit rank function over the base symbols,
// the structural countdown witness of a graded machine, or a rewrite cycle
// proving the property fails.
struct WrWitness {
    enum class Kind : uint8_t { ExplicitRank, GradedRank, Violation };
    Kind kind = Kind::Violation;
    std::vector<uint64_t> base_rank;  // ExplicitRank: rank per base id
    uint64_t k = 0;                   // GradedRank
    std::vector<uint32_t> cycle;      // Violation: base ids forming a rewrite cycle
    bool ok() const { return kind != Kind::Violation; }
};

class OneTapeDtm {
public:
    explicit OneTapeDtm(SymbolTable syms) : syms_(std::move(syms)) {}

    State add_state(View v = View::Whole);
    State add_states(uint32_t count, View v = View::Whole);
    void add_entry(State s, uint32_t viewed_base, Trans t);
    // Fallback applied to any non-blank, non-endmarker viewed base with no
    // explicit entry: rewrite the same symbol and move. Keeps navigation
    // states from enumerating the whole work alphabet.
    void add_default(State s, Dir dir, State next);
    void set_initial(State s) { initial_ = s; }
    void set_final(State s, bool f = true);
    void set_end_marked(bool em) { end_marked_ = em; }
    void set_grading(uint64_t k) { grading_ = Grading{k}; }
    void clear_grading() { grading_.reset(); }
    void set_pair_mode(bool pm) { pair_mode_ = pm; }
    void set_explicit_rank(std::vector<uint64_t> rank) { explicit_rank_ = std::move(rank); }
    void set_state_name(State s, std::string name);

    // Sorts the entry pool and builds the per-state index; rejects duplicate
    // (state, base) keys. Must be called before running.
    void finalize();
    bool finalized() const { return finalized_; }

    const SymbolTable& syms() const { return syms_; }
    uint32_t num_states() const { return static_cast<uint32_t>(views_.size()); }
    State initial() const { return initial_; }
    bool is_final(State s) const { return finals_[s] != 0; }
    bool end_marked() const { return end_marked_; }
    bool pair_mode() const { return pair_mode_; }
    const std::optional<Grading>& grading() const { return grading_; }
    const std::optional<std::vector<uint64_t>>& explicit_rank() const { return explicit_rank_; }
    bool has_wr_witness() const { return grading_.has_value() || explicit_rank_.has_value(); }
    View view(State s) const { return views_[s]; }
    const std::string& state_name(State s) const;
    uint64_t num_entries() const { return pool_.size(); }

    const Trans* lookup(State s, uint32_t viewed_base) const;
    // Resolved transition including the default fallback; false if undefined.
    bool resolve(State s, uint32_t viewed_base, Trans* out) const;
    bool has_default(State s) const { return defaults_[s].has; }
    // Enumerate all (state, viewed_base, trans) entries.
    template <typename F>
    void for_each_entry(F&& f) const {
        for (const auto& e : pool_) f(e.state, e.base, e.t);
    }
    template <typename F>
    void for_each_default(F&& f) const {
        for (State s = 0; s < defaults_.size(); ++s)
            if (defaults_[s].has) f(s, defaults_[s].dir, defaults_[s].next);
    }
    uint64_t num_defaults() const;

    uint64_t virtual_symbol_count() const;
    uint64_t max_rank() const;  // of the virtual alphabet under the witness
    SizeReport size_report() const;
    uint64_t default_budget(size_t input_len) const;

    // Per-run working state lives in the caller; machines are immutable
    // after finalize() and safe to run from many threads.

private:
    struct Entry {
        State state;
        uint32_t base;
        Trans t;
    };
    struct DefaultT {
        bool has = false;
        Dir dir = Dir::R;
        State next = 0;
    };

    SymbolTable syms_;
    std::vector<View> views_;
    std::vector<DefaultT> defaults_;
    std::vector<uint8_t> finals_;
    State initial_ = 0;
    bool end_marked_ = false;
    bool pair_mode_ = false;
    std::optional<Grading> grading_;
    std::optional<std::vector<uint64_t>> explicit_rank_;
    std::vector<Entry> pool_;
    std::vector<std::pair<uint32_t, uint32_t>> spans_;  // per state: offset,len into pool_
    bool finalized_ = false;
    std::map<State, std::string> state_names_;
};

// Simulates M on w until halt, detected divergence, or budget exhaustion.
// Machines without a weight-reducing witness require an explicit budget.
RunResult run(const OneTapeDtm& m, const Word& w,
              std::optional<uint64_t> budget = std::nullopt, bool capture_tape = false);

// Single-step interface over an explicit configuration (test-facing; the
// simulator above keeps its own dense tape).
struct TmConfiguration {
    State state = 0;
    std::map<int64_t, Cell> tape;  // absent cell = blank
    int64_t head = 0;
};

std::optional<TmConfiguration> step(const OneTapeDtm& m, const TmConfiguration& c);

TmConfiguration initial_configuration(const OneTapeDtm& m, const Word& w);

// Static checkers.
WrWitness check_weight_reducing(const OneTapeDtm& m);
// Returns true iff every transition on an endmarker rewrites it and moves
// inward, and the machine declares endmarkers at all.
bool check_end_marked(const OneTapeDtm& m, std::string* why = nullptr);

// Independent cycle finder over the explicit rewrite graph (used to
// cross-check check_weight_reducing in the tests).
bool rewrite_graph_has_cycle(const OneTapeDtm& m);

uint64_t nfa_size_metric(uint32_t num_states, uint32_t alphabet_size);

}  // namespace nfa2tm
