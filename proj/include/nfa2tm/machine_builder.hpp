#pragma once

// Structured intermediate representation for assembling Turing machines from
// subroutines (cell navigation, bit tests, bounded loops over state indices,
// track projection) and a compiler from the IR to flat transition tables.
// Also the two generic machine passes: the per-cell visit countdown that
// turns a visit-bounded machine into a weight-reducing one, and the tape
// fold that confines a left-overhang machine between endmarkers.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nfa2tm/tape_machine.hpp"

namespace nfa2tm {
namespace ir {

// Affine position expression over loop variables: base + sum coeff * var.
struct PosExpr {
    int64_t base = 0;
    std::vector<std::pair<std::string, int64_t>> terms;

    PosExpr(int64_t b = 0) : base(b) {}  // NOLINT(google-explicit-constructor)
    PosExpr plus(const std::string& var, int64_t coeff) const {
        PosExpr e = *this;
        e.terms.emplace_back(var, coeff);
        return e;
    }
};

using Env = std::map<std::string, uint32_t>;
using Pred = std::function<bool(const Env&)>;

enum class NodeKind : uint8_t {
    Seq,
    MoveTo,
    ReadBit,
    WriteBit,       // constant bit or from-flag
    WriteProjected, // write the plain bit equal to the given track's value
    ForStateIndex,
    IfPred,         // compile-time predicate over the loop environment
    SetFlag,
    ClearFlag,
    IfFlag,
    WithFlag,
    LoopWhileFlag,  // do { clear flag; body } while (flag)
    CallFixed,
    Accept,
    Reject,
    ExitRight,
    ShiftWindow,
};

struct Node;
using NodePtr = std::shared_ptr<Node>;

struct Node {
    NodeKind kind;
    std::string name;           // diagnostics: names the node in compile errors
    std::vector<NodePtr> kids;  // Seq children / then,else / loop body
    PosExpr pos;                // MoveTo
    uint32_t track = 0;         // ReadBit / WriteBit / WriteProjected
    int8_t value = 0;           // WriteBit: 0/1, or -1 = take the flag's value
    std::string flag;           // flag ops / WriteBit from flag
    std::string var;            // ForStateIndex
    uint32_t bound = 0;         // ForStateIndex iteration count
    Pred pred;                  // IfPred
    std::string tag;            // ExitRight
    int64_t shift = 0;          // ShiftWindow
};

NodePtr seq(std::vector<NodePtr> kids);
NodePtr move_to(PosExpr pos);
NodePtr read_bit(uint32_t track, NodePtr then_branch, NodePtr else_branch);
NodePtr write_bit(uint32_t track, int bit);
NodePtr write_bit_from_flag(uint32_t track, const std::string& flag);
NodePtr write_projected(uint32_t track);
NodePtr for_state_index(const std::string& var, uint32_t bound, NodePtr body);
NodePtr if_pred(const std::string& name, Pred pred, NodePtr body);
NodePtr set_flag(const std::string& flag);
NodePtr clear_flag(const std::string& flag);
NodePtr if_flag(const std::string& flag, NodePtr then_branch, NodePtr else_branch);
NodePtr with_flag(const std::string& flag, NodePtr body);
NodePtr loop_while_flag(const std::string& flag, NodePtr body);
NodePtr call_fixed(NodePtr sub);
NodePtr accept();
NodePtr reject();
NodePtr exit_right(const std::string& tag);
NodePtr shift_window(int64_t delta);
NodePtr nop();

}  // namespace ir

// Work-symbol universe of a compiled window program: bit tuples over a fixed
// set of tracks, plus registered plain symbols that may appear pristine in
// the window. A plain symbol reads fixed per-track values and is promoted to
// a tuple by its first write.
class TrackAlphabet {
public:
    TrackAlphabet(SymbolTable* syms, uint32_t num_tracks, const std::string& prefix = "");

    uint32_t num_tracks() const { return num_tracks_; }
    uint32_t tuple_base(uint32_t bits) const { return tuple_bases_.at(bits); }
    uint32_t num_tuples() const { return 1u << num_tracks_; }

    // read_bits: per-track values the plain symbol presents before promotion;
    // promote_bits: tuple bits its first write starts from.
    void register_plain(uint32_t base, uint32_t read_bits, uint32_t promote_bits);
    // Plain bases written by WriteProjected (and readable as projection input).
    void set_projection_plains(uint32_t base0, uint32_t base1);

    struct PlainInfo {
        uint32_t base;
        uint32_t read_bits;
        uint32_t promote_bits;
    };
    const std::vector<PlainInfo>& plains() const { return plains_; }
    std::optional<uint32_t> projection_plain(int bit) const;

    bool is_tuple(uint32_t base) const;
    uint32_t tuple_bits(uint32_t base) const;
    const PlainInfo* plain_info(uint32_t base) const;

private:
    uint32_t num_tracks_;
    std::vector<uint32_t> tuple_bases_;
    std::map<uint32_t, uint32_t> bits_by_base_;
    std::vector<PlainInfo> plains_;
    uint32_t proj_plain_[2] = {kNoBase, kNoBase};
};

struct CompileEnv {
    OneTapeDtm* dtm = nullptr;
    const TrackAlphabet* tracks = nullptr;
    int64_t window_len = 0;  // valid positions 0..window_len-1 (before shifts)
    int64_t entry_pos = 0;
    // Resolver for ExitRight targets, given the tag and live flag values.
    std::function<State(const std::string&, const std::map<std::string, bool>&)> exit_right;
    // Shared halting states; created inside the fragment when absent.
    std::optional<State> accept_state;
    std::optional<State> reject_state;
    bool keep_source_map = false;
};

struct CompileResult {
    State entry = 0;
    uint64_t num_states = 0;       // states this fragment added
    uint64_t control_points = 0;   // unrolled step ops (state-count bound)
};

// Compiles the program into env.dtm. States are (control point, live flags,
// window position) tuples realized on demand; the head position is tracked
// entirely in the state, per-step moves default to L unless at the window's
// left edge. Throws on segment-bound violations or nondeterministic branch
// overlap, naming the offending node.
CompileResult compile_program(const ir::NodePtr& program, CompileEnv env);

// Debug facility: when enabled, every subsequent compilation annotates its
// states with the originating IR node, window position, and live flags; the
// machine file printer emits these as comments.
void set_compile_source_maps(bool enabled);
bool compile_source_maps_enabled();

// Reference interpreter for compiled-window programs: runs the IR directly
// over an array of base symbols. Used to cross-check the compiler.
struct IrRunResult {
    enum class Exit : uint8_t { Accepted, Rejected, ExitedRight };
    Exit exit = Exit::Rejected;
    std::string exit_tag;
    std::map<std::string, bool> exit_flags;
    std::vector<uint32_t> window;  // final base ids
    uint64_t ops = 0;
};
IrRunResult ir_interpret(const ir::NodePtr& program, const TrackAlphabet& tracks,
                         std::vector<uint32_t> window, int64_t entry_pos);

// Countdown pass: given a machine whose runs perform at most k steps on
// each tape cell, produce the equivalent weight-reducing machine that
// stores a remaining-visit countdown in every written symbol. Same states;
// work alphabet gains k graded copies of each written symbol.
OneTapeDtm wr_from_visit_bounded(const OneTapeDtm& m, uint64_t k);

// Certificate that k is too small: an input and a cell where the raw
// machine exceeds k steps.
struct VisitBoundViolation {
    Word input;
    int64_t cell;
    uint64_t visits;
};
std::optional<VisitBoundViolation> verify_visit_bound(const OneTapeDtm& raw_machine,
                                                      uint64_t k,
                                                      const std::vector<Word>& inputs,
                                                      uint64_t budget);

// Fold pass: fold the tape portion left of the initial segment onto a
// second track between endmarkers. Exactly doubles the states (a track
// selector per state); the work alphabet becomes Gamma plus Gamma^2. Output
// agrees with the input machine on words of length >= C (shorter inputs may
// collide with the fold and halt rejecting).
OneTapeDtm fold_to_hennie(const OneTapeDtm& m, uint64_t C);

}  // namespace nfa2tm
