#include "nfa2tm/machine_builder.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <stdexcept>
#include <unordered_map>

namespace nfa2tm {
namespace ir {

namespace {
NodePtr make(NodeKind k) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    return n;
}
}  // namespace

NodePtr seq(std::vector<NodePtr> kids) {
    auto n = make(NodeKind::Seq);
    n->kids = std::move(kids);
    return n;
}
NodePtr move_to(PosExpr pos) {
    auto n = make(NodeKind::MoveTo);
    n->pos = std::move(pos);
    return n;
}
NodePtr read_bit(uint32_t track, NodePtr then_branch, NodePtr else_branch) {
    auto n = make(NodeKind::ReadBit);
    n->track = track;
    n->kids = {std::move(then_branch), std::move(else_branch)};
    return n;
}
NodePtr write_bit(uint32_t track, int bit) {
    auto n = make(NodeKind::WriteBit);
    n->track = track;
    n->value = static_cast<int8_t>(bit);
    return n;
}
NodePtr write_bit_from_flag(uint32_t track, const std::string& flag) {
    auto n = make(NodeKind::WriteBit);
    n->track = track;
    n->value = -1;
    n->flag = flag;
    return n;
}
NodePtr write_projected(uint32_t track) {
    auto n = make(NodeKind::WriteProjected);
    n->track = track;
    return n;
}
NodePtr for_state_index(const std::string& var, uint32_t bound, NodePtr body) {
    auto n = make(NodeKind::ForStateIndex);
    n->var = var;
    n->bound = bound;
    n->kids = {std::move(body)};
    return n;
}
NodePtr if_pred(const std::string& name, Pred pred, NodePtr body) {
    auto n = make(NodeKind::IfPred);
    n->name = name;
    n->pred = std::move(pred);
    n->kids = {std::move(body)};
    return n;
}
NodePtr set_flag(const std::string& flag) {
    auto n = make(NodeKind::SetFlag);
    n->flag = flag;
    return n;
}
NodePtr clear_flag(const std::string& flag) {
    auto n = make(NodeKind::ClearFlag);
    n->flag = flag;
    return n;
}
NodePtr if_flag(const std::string& flag, NodePtr then_branch, NodePtr else_branch) {
    auto n = make(NodeKind::IfFlag);
    n->flag = flag;
    n->kids = {std::move(then_branch), std::move(else_branch)};
    return n;
}
NodePtr with_flag(const std::string& flag, NodePtr body) {
    auto n = make(NodeKind::WithFlag);
    n->flag = flag;
    n->kids = {std::move(body)};
    return n;
}
NodePtr loop_while_flag(const std::string& flag, NodePtr body) {
    auto n = make(NodeKind::LoopWhileFlag);
    n->flag = flag;
    n->kids = {std::move(body)};
    return n;
}
NodePtr call_fixed(NodePtr sub) {
    auto n = make(NodeKind::CallFixed);
    n->kids = {std::move(sub)};
    return n;
}
NodePtr accept() { return make(NodeKind::Accept); }
NodePtr reject() { return make(NodeKind::Reject); }
NodePtr exit_right(const std::string& tag) {
    auto n = make(NodeKind::ExitRight);
    n->tag = tag;
    return n;
}
NodePtr shift_window(int64_t delta) {
    auto n = make(NodeKind::ShiftWindow);
    n->shift = delta;
    return n;
}
NodePtr nop() { return seq({}); }

}  // namespace ir

TrackAlphabet::TrackAlphabet(SymbolTable* syms, uint32_t num_tracks, const std::string& prefix)
    : num_tracks_(num_tracks) {
    if (num_tracks == 0 || num_tracks > 8) throw std::invalid_argument("track count out of range");
    tuple_bases_.reserve(1u << num_tracks);
    for (uint32_t bits = 0; bits < (1u << num_tracks); ++bits) {
        std::string name = prefix + "(";
        for (uint32_t t = 0; t < num_tracks; ++t) {
            if (t) name += '|';
            name += ((bits >> t) & 1u) ? '1' : '0';
        }
        name += ')';
        uint32_t base = syms->add_work(std::move(name));
        tuple_bases_.push_back(base);
        bits_by_base_[base] = bits;
    }
}

void TrackAlphabet::register_plain(uint32_t base, uint32_t read_bits, uint32_t promote_bits) {
    plains_.push_back(PlainInfo{base, read_bits, promote_bits});
}

void TrackAlphabet::set_projection_plains(uint32_t base0, uint32_t base1) {
    proj_plain_[0] = base0;
    proj_plain_[1] = base1;
}

std::optional<uint32_t> TrackAlphabet::projection_plain(int bit) const {
    uint32_t b = proj_plain_[bit ? 1 : 0];
    if (b == kNoBase) return std::nullopt;
    return b;
}

bool TrackAlphabet::is_tuple(uint32_t base) const { return bits_by_base_.count(base) != 0; }

uint32_t TrackAlphabet::tuple_bits(uint32_t base) const { return bits_by_base_.at(base); }

const TrackAlphabet::PlainInfo* TrackAlphabet::plain_info(uint32_t base) const {
    for (const auto& p : plains_)
        if (p.base == base) return &p;
    return nullptr;
}

namespace {

// Flattened op graph: the IR tree with loops unrolled, compile-time
// predicates resolved, and flag names bound to slots with liveness masks.
struct Op {
    enum class K : uint8_t {
        Move,     // walk toward pos; free when already there
        Write,    // write bit (value or flag) into track
        Read,     // branch on track bit
        Project,  // write plain symbol carrying the track bit
        Exit,     // step right out of the window
        SetF,
        ClearF,
        BranchF,
        Accept,
        Reject,
    };
    K k;
    int64_t pos = 0;       // Move target
    int64_t band_lo = 0;   // window band at this op (after shifts)
    int64_t band_hi = 0;
    uint32_t track = 0;
    int8_t value = 0;      // Write: 0/1; -1 = from flag
    uint32_t flag = 0;     // flag slot
    uint32_t next = kNoOp;
    uint32_t next_else = kNoOp;
    uint64_t live = 0;     // live flag slots at this op
    std::string tag;       // Exit tag / node name for diagnostics
    static constexpr uint32_t kNoOp = 0xffffffffu;
};

struct FlagScope {
    std::string name;
    uint32_t slot;
};

struct Unroller {
    const CompileEnv& env;
    std::vector<Op>& ops;
    std::vector<FlagScope> scopes;
    std::vector<std::pair<std::string, uint32_t>> flag_names;  // slot -> name
    uint32_t flag_count = 0;
    int64_t shift = 0;
    ir::Env loop_env;

    // A dangling continuation slot of an emitted op.
    struct Patch {
        uint32_t op;
        bool else_slot;
    };
    // Unrolled subgraph: entry op (kNoOp when the node emits nothing and
    // control passes straight through) plus the slots to patch with the
    // continuation.
    struct Piece {
        uint32_t entry = Op::kNoOp;
        std::vector<Patch> outs;
    };

    void patch_to(const std::vector<Patch>& outs, uint32_t target) {
        for (const Patch& p : outs)
            (p.else_slot ? ops[p.op].next_else : ops[p.op].next) = target;
    }

    uint32_t emit(Op op) {
        op.band_lo = shift;
        op.band_hi = shift + env.window_len - 1;
        op.live = live_mask();
        ops.push_back(std::move(op));
        return static_cast<uint32_t>(ops.size() - 1);
    }

    uint64_t live_mask() const {
        uint64_t m = 0;
        for (const auto& s : scopes) m |= uint64_t(1) << s.slot;
        return m;
    }

    uint32_t flag_slot(const std::string& name, const ir::Node& node) {
        for (auto it = scopes.rbegin(); it != scopes.rend(); ++it)
            if (it->name == name) return it->slot;
        throw std::runtime_error("flag '" + name + "' not in scope at node " + node_label(node));
    }

    static std::string node_label(const ir::Node& n) {
        if (!n.name.empty()) return n.name;
        return "kind#" + std::to_string(static_cast<int>(n.kind));
    }

    int64_t eval_pos(const ir::PosExpr& e, const ir::Node& node) {
        int64_t v = e.base;
        for (const auto& [var, coeff] : e.terms) {
            auto it = loop_env.find(var);
            if (it == loop_env.end())
                throw std::runtime_error("loop variable '" + var + "' unbound at node " +
                                         node_label(node));
            v += coeff * static_cast<int64_t>(it->second);
        }
        return v + shift;
    }

    // Chains pieces in forward (execution) order, so unroll-time state such
    // as the window shift flows the way the program runs.
    Piece chain(const std::vector<ir::NodePtr>& nodes) {
        Piece out;
        bool have_entry = false;
        std::vector<Patch> pending;
        for (const auto& node : nodes) {
            Piece p = unroll(node);
            if (p.entry == Op::kNoOp) {
                // transparent node: nothing emitted
                for (auto& x : p.outs) pending.push_back(x);
                continue;
            }
            patch_to(pending, p.entry);
            pending = std::move(p.outs);
            if (!have_entry) {
                out.entry = p.entry;
                have_entry = true;
            }
        }
        out.outs = std::move(pending);
        return out;
    }

    Piece unroll(const ir::NodePtr& node) {
        const ir::Node& n = *node;
        switch (n.kind) {
            case ir::NodeKind::Seq:
                return chain(n.kids);
            case ir::NodeKind::MoveTo: {
                int64_t target = eval_pos(n.pos, n);
                if (target < shift || target >= shift + env.window_len)
                    throw std::runtime_error("MoveTo outside working segment at node " +
                                             node_label(n));
                Op op{.k = Op::K::Move};
                op.pos = target;
                op.tag = node_label(n);
                uint32_t id = emit(std::move(op));
                return Piece{id, {{id, false}}};
            }
            case ir::NodeKind::ReadBit: {
                Op op{.k = Op::K::Read};
                op.track = n.track;
                op.tag = node_label(n);
                uint32_t id = emit(std::move(op));
                Piece then_p = unroll(n.kids[0]);
                Piece else_p = unroll(n.kids[1]);
                Piece out{id, {}};
                auto wire = [&](Piece& arm, bool else_slot) {
                    if (arm.entry == Op::kNoOp) {
                        out.outs.push_back({id, else_slot});
                    } else {
                        (else_slot ? ops[id].next_else : ops[id].next) = arm.entry;
                        for (auto& x : arm.outs) out.outs.push_back(x);
                    }
                };
                wire(then_p, false);
                wire(else_p, true);
                return out;
            }
            case ir::NodeKind::WriteBit: {
                Op op{.k = Op::K::Write};
                op.track = n.track;
                op.value = n.value;
                if (n.value < 0) op.flag = flag_slot(n.flag, n);
                op.tag = node_label(n);
                uint32_t id = emit(std::move(op));
                return Piece{id, {{id, false}}};
            }
            case ir::NodeKind::WriteProjected: {
                Op op{.k = Op::K::Project};
                op.track = n.track;
                op.tag = node_label(n);
                uint32_t id = emit(std::move(op));
                return Piece{id, {{id, false}}};
            }
            case ir::NodeKind::ForStateIndex: {
                if (loop_env.count(n.var))
                    throw std::runtime_error("loop variable '" + n.var + "' shadowed at node " +
                                             node_label(n));
                std::vector<ir::NodePtr> unused;
                Piece out;
                std::vector<Patch> pending;
                bool have_entry = false;
                for (uint32_t i = 0; i < n.bound; ++i) {
                    loop_env[n.var] = i;
                    Piece p = unroll(n.kids[0]);
                    if (p.entry == Op::kNoOp) {
                        for (auto& x : p.outs) pending.push_back(x);
                        continue;
                    }
                    patch_to(pending, p.entry);
                    pending = std::move(p.outs);
                    if (!have_entry) {
                        out.entry = p.entry;
                        have_entry = true;
                    }
                }
                loop_env.erase(n.var);
                out.outs = std::move(pending);
                return out;
            }
            case ir::NodeKind::IfPred:
                if (n.pred(loop_env)) return unroll(n.kids[0]);
                return Piece{};
            case ir::NodeKind::SetFlag: {
                Op op{.k = Op::K::SetF};
                op.flag = flag_slot(n.flag, n);
                uint32_t id = emit(std::move(op));
                return Piece{id, {{id, false}}};
            }
            case ir::NodeKind::ClearFlag: {
                Op op{.k = Op::K::ClearF};
                op.flag = flag_slot(n.flag, n);
                uint32_t id = emit(std::move(op));
                return Piece{id, {{id, false}}};
            }
            case ir::NodeKind::IfFlag: {
                Op op{.k = Op::K::BranchF};
                op.flag = flag_slot(n.flag, n);
                uint32_t id = emit(std::move(op));
                Piece then_p = unroll(n.kids[0]);
                Piece else_p = unroll(n.kids[1]);
                Piece out{id, {}};
                auto wire = [&](Piece& arm, bool else_slot) {
                    if (arm.entry == Op::kNoOp) {
                        out.outs.push_back({id, else_slot});
                    } else {
                        (else_slot ? ops[id].next_else : ops[id].next) = arm.entry;
                        for (auto& x : arm.outs) out.outs.push_back(x);
                    }
                };
                wire(then_p, false);
                wire(else_p, true);
                return out;
            }
            case ir::NodeKind::WithFlag: {
                if (flag_count >= 64)
                    throw std::runtime_error("too many flags at node " + node_label(n));
                uint32_t slot = flag_count++;
                flag_names.emplace_back(n.flag, slot);
                scopes.push_back({n.flag, slot});
                // A fresh scope starts cleared.
                Op clear{.k = Op::K::ClearF};
                clear.flag = slot;
                uint32_t clear_id = emit(std::move(clear));
                Piece body = unroll(n.kids[0]);
                scopes.pop_back();
                if (body.entry == Op::kNoOp) return Piece{clear_id, {{clear_id, false}}};
                ops[clear_id].next = body.entry;
                return Piece{clear_id, std::move(body.outs)};
            }
            case ir::NodeKind::LoopWhileFlag: {
                uint32_t slot = flag_slot(n.flag, n);
                // do { clear f; body } while (f)
                Op clear{.k = Op::K::ClearF};
                clear.flag = slot;
                uint32_t clear_id = emit(std::move(clear));
                int64_t shift_before = shift;
                Piece body = unroll(n.kids[0]);
                if (shift != shift_before)
                    throw std::runtime_error("loop body shifts the window at node " +
                                             node_label(n));
                Op branch{.k = Op::K::BranchF};
                branch.flag = slot;
                uint32_t branch_id = emit(std::move(branch));
                ops[branch_id].next = clear_id;  // loop again
                if (body.entry == Op::kNoOp) {
                    ops[clear_id].next = branch_id;
                } else {
                    ops[clear_id].next = body.entry;
                    patch_to(body.outs, branch_id);
                }
                return Piece{clear_id, {{branch_id, true}}};
            }
            case ir::NodeKind::CallFixed:
                return unroll(n.kids[0]);
            case ir::NodeKind::Accept:
                return Piece{emit(Op{.k = Op::K::Accept}), {}};
            case ir::NodeKind::Reject:
                return Piece{emit(Op{.k = Op::K::Reject}), {}};
            case ir::NodeKind::ExitRight: {
                Op op{.k = Op::K::Exit};
                op.tag = n.tag;
                return Piece{emit(std::move(op)), {}};
            }
            case ir::NodeKind::ShiftWindow:
                shift += n.shift;
                return Piece{};
        }
        throw std::logic_error("unhandled IR node");
    }
};

struct AbstractKey {
    uint32_t op;
    uint64_t flags;
    int64_t pos;
    bool operator==(const AbstractKey&) const = default;
};

struct AbstractKeyHash {
    size_t operator()(const AbstractKey& k) const {
        uint64_t h = k.flags * 0x9e3779b97f4a7c15ull;
        h ^= (uint64_t(k.op) << 17) + 0x517cc1b727220a95ull;
        h ^= uint64_t(k.pos + 4096) * 0x2545f4914f6cdd1dull;
        h ^= h >> 29;
        return static_cast<size_t>(h);
    }
};

class Compiler {
public:
    Compiler(const ir::NodePtr& program, CompileEnv env) : env_(std::move(env)) {
        Unroller u{env_, ops_};
        // Program falls through to Accept when it neither halts nor exits.
        Unroller::Piece p = u.unroll(program);
        uint32_t halt_accept = u.emit(Op{.k = Op::K::Accept});
        if (p.entry == Op::kNoOp) {
            entry_op_ = halt_accept;
        } else {
            u.patch_to(p.outs, halt_accept);
            entry_op_ = p.entry;
        }
        flag_names_ = std::move(u.flag_names);
    }

    CompileResult run() {
        CompileResult res;
        res.entry = resolve(entry_op_, 0, env_.entry_pos).state;
        while (!worklist_.empty()) {
            auto [op, flags, pos, state] = worklist_.front();
            worklist_.pop_front();
            expand(op, flags, pos, state);
        }
        res.num_states = added_states_;
        uint64_t cp = 0;
        for (const Op& o : ops_)
            if (o.k == Op::K::Move || o.k == Op::K::Write || o.k == Op::K::Read ||
                o.k == Op::K::Project || o.k == Op::K::Exit)
                ++cp;
        res.control_points = cp;
        return res;
    }

private:
    enum class TargetKind { State, AcceptHalt, RejectHalt };
    struct Target {
        TargetKind kind;
        State state;
    };

    // Follows free ops until a step op, a halt, or an exit wiring point.
    Target resolve(uint32_t op_id, uint64_t flags, int64_t pos) {
        for (;;) {
            const Op& op = ops_[op_id];
            switch (op.k) {
                case Op::K::SetF:
                    flags |= uint64_t(1) << op.flag;
                    op_id = op.next;
                    break;
                case Op::K::ClearF:
                    flags &= ~(uint64_t(1) << op.flag);
                    op_id = op.next;
                    break;
                case Op::K::BranchF:
                    op_id = ((flags >> op.flag) & 1u) ? op.next : op.next_else;
                    break;
                case Op::K::Move:
                    if (pos == op.pos) {
                        op_id = op.next;
                        break;
                    }
                    return Target{TargetKind::State, state_for(op_id, flags, pos)};
                case Op::K::Accept:
                    return Target{TargetKind::AcceptHalt, accept_state()};
                case Op::K::Reject:
                    return Target{TargetKind::RejectHalt, reject_state()};
                default:
                    return Target{TargetKind::State, state_for(op_id, flags, pos)};
            }
        }
    }

    State state_for(uint32_t op_id, uint64_t flags, int64_t pos) {
        const Op& op = ops_[op_id];
        AbstractKey key{op_id, flags & op.live, pos};
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        State s = env_.dtm->add_state(View::Whole);
        ++added_states_;
        if (env_.keep_source_map)
            env_.dtm->set_state_name(
                s, op.tag + "@" + std::to_string(pos) + "/f" + std::to_string(key.flags));
        memo_.emplace(key, s);
        worklist_.push_back({op_id, key.flags, pos, s});
        return s;
    }

    State accept_state() {
        if (!env_.accept_state) {
            env_.accept_state = env_.dtm->add_state(View::Whole);
            ++added_states_;
            env_.dtm->set_final(*env_.accept_state, true);
        }
        return *env_.accept_state;
    }
    State reject_state() {
        if (!env_.reject_state) {
            env_.reject_state = env_.dtm->add_state(View::Whole);
            ++added_states_;
        }
        return *env_.reject_state;
    }

    int64_t drift(const Op& op, int64_t pos) const { return pos > op.band_lo ? pos - 1 : pos + 1; }

    void expand(uint32_t op_id, uint64_t flags, int64_t pos, State state) {
        const Op& op = ops_[op_id];
        OneTapeDtm& dtm = *env_.dtm;
        const TrackAlphabet& tr = *env_.tracks;
        switch (op.k) {
            case Op::K::Move: {
                // One step toward the target; identical behavior on every
                // window symbol, so a single default entry suffices.
                int64_t npos = pos + (op.pos > pos ? 1 : -1);
                Target t = resolve(op_id, flags, npos);
                dtm.add_default(state, op.pos > pos ? Dir::R : Dir::L, t.state);
                break;
            }
            case Op::K::Write: {
                int bit = op.value < 0 ? int((flags >> op.flag) & 1u) : op.value;
                int64_t npos = drift(op, pos);
                Dir d = npos > pos ? Dir::R : Dir::L;
                Target t = resolve(op.next, flags, npos);
                for (uint32_t bits = 0; bits < tr.num_tuples(); ++bits) {
                    uint32_t nb = bit ? (bits | (1u << op.track)) : (bits & ~(1u << op.track));
                    dtm.add_entry(state, tr.tuple_base(bits), Trans{t.state, tr.tuple_base(nb), d});
                }
                for (const auto& p : tr.plains()) {
                    uint32_t nb = bit ? (p.promote_bits | (1u << op.track))
                                      : (p.promote_bits & ~(1u << op.track));
                    dtm.add_entry(state, p.base, Trans{t.state, tr.tuple_base(nb), d});
                }
                break;
            }
            case Op::K::Read: {
                int64_t npos = drift(op, pos);
                Dir d = npos > pos ? Dir::R : Dir::L;
                Target t1 = resolve(op.next, flags, npos);
                Target t0 = resolve(op.next_else, flags, npos);
                for (uint32_t bits = 0; bits < tr.num_tuples(); ++bits) {
                    bool bit = (bits >> op.track) & 1u;
                    dtm.add_entry(state, tr.tuple_base(bits),
                                  Trans{bit ? t1.state : t0.state, tr.tuple_base(bits), d});
                }
                for (const auto& p : tr.plains()) {
                    bool bit = (p.read_bits >> op.track) & 1u;
                    dtm.add_entry(state, p.base, Trans{bit ? t1.state : t0.state, p.base, d});
                }
                break;
            }
            case Op::K::Project: {
                int64_t npos = drift(op, pos);
                Dir d = npos > pos ? Dir::R : Dir::L;
                Target t = resolve(op.next, flags, npos);
                for (uint32_t bits = 0; bits < tr.num_tuples(); ++bits) {
                    bool bit = (bits >> op.track) & 1u;
                    auto plain = tr.projection_plain(bit);
                    if (!plain)
                        throw std::runtime_error("projection without projection plains at node " +
                                                 op.tag);
                    dtm.add_entry(state, tr.tuple_base(bits), Trans{t.state, *plain, d});
                }
                for (const auto& p : tr.plains()) {
                    bool bit = (p.read_bits >> op.track) & 1u;
                    auto plain = tr.projection_plain(bit);
                    if (!plain)
                        throw std::runtime_error("projection without projection plains at node " +
                                                 op.tag);
                    dtm.add_entry(state, p.base, Trans{t.state, *plain, d});
                }
                break;
            }
            case Op::K::Exit: {
                if (!env_.exit_right)
                    throw std::runtime_error("ExitRight without resolver at node " + op.tag);
                std::map<std::string, bool> fl;
                for (const auto& [name, slot] : flag_names_)
                    if ((op.live >> slot) & 1u) fl[name] = (flags >> slot) & 1u;
                State t = env_.exit_right(op.tag, fl);
                dtm.add_default(state, Dir::R, t);
                break;
            }
            default:
                throw std::logic_error("free op reached expansion");
        }
    }

    CompileEnv env_;
    std::vector<Op> ops_;
    uint32_t entry_op_ = 0;
    std::vector<std::pair<std::string, uint32_t>> flag_names_;
    std::unordered_map<AbstractKey, State, AbstractKeyHash> memo_;
    std::deque<std::tuple<uint32_t, uint64_t, int64_t, State>> worklist_;
    uint64_t added_states_ = 0;
};

}  // namespace

namespace {
bool g_source_maps = false;
}  // namespace

void set_compile_source_maps(bool enabled) { g_source_maps = enabled; }
bool compile_source_maps_enabled() { return g_source_maps; }

CompileResult compile_program(const ir::NodePtr& program, CompileEnv env) {
    if (!env.dtm || !env.tracks) throw std::invalid_argument("compile env incomplete");
    if (env.window_len < 2) throw std::invalid_argument("window too short");
    env.keep_source_map = env.keep_source_map || g_source_maps;
    Compiler c(program, std::move(env));
    return c.run();
}

namespace {

struct Interp {
    const TrackAlphabet& tr;
    std::vector<uint32_t>& window;
    int64_t pos;
    int64_t shift = 0;
    int64_t window_len;
    std::map<std::string, std::vector<bool>> flags;  // scope stacks by name
    IrRunResult* out;
    bool done = false;

    bool flag_value(const std::string& f) {
        auto it = flags.find(f);
        if (it == flags.end() || it->second.empty())
            throw std::runtime_error("flag '" + f + "' not in scope");
        return it->second.back();
    }
    void flag_set(const std::string& f, bool v) {
        auto it = flags.find(f);
        if (it == flags.end() || it->second.empty())
            throw std::runtime_error("flag '" + f + "' not in scope");
        it->second.back() = v;
    }

    // Positions are absolute tape indices into `window`; the shift only
    // moves the legal band, mirroring the compiler's bookkeeping.
    uint32_t& cell_at(int64_t p) {
        if (p < 0 || p >= static_cast<int64_t>(window.size()))
            throw std::runtime_error("interpreter: position outside provided window");
        return window[static_cast<size_t>(p)];
    }

    uint32_t cell_bits_for_read(uint32_t base) {
        if (tr.is_tuple(base)) return tr.tuple_bits(base);
        if (const auto* p = tr.plain_info(base)) return p->read_bits;
        throw std::runtime_error("read from non-window symbol");
    }

    void write_track(uint32_t track, bool bit) {
        uint32_t& cell = cell_at(pos);
        uint32_t bits;
        if (tr.is_tuple(cell))
            bits = tr.tuple_bits(cell);
        else if (const auto* p = tr.plain_info(cell))
            bits = p->promote_bits;
        else
            throw std::runtime_error("write to non-window symbol");
        bits = bit ? (bits | (1u << track)) : (bits & ~(1u << track));
        cell = tr.tuple_base(bits);
        ++out->ops;
        drift();
    }

    void drift() { pos = pos > shift ? pos - 1 : pos + 1; }

    void check_pos(int64_t p) {
        if (p < shift || p >= shift + window_len)
            throw std::runtime_error("interpreter: position out of window");
    }

    void run(const ir::NodePtr& node, ir::Env& env) {
        if (done) return;
        const ir::Node& n = *node;
        switch (n.kind) {
            case ir::NodeKind::Seq:
                for (const auto& k : n.kids) {
                    run(k, env);
                    if (done) return;
                }
                return;
            case ir::NodeKind::MoveTo: {
                int64_t target = n.pos.base + shift;
                for (const auto& [var, coeff] : n.pos.terms)
                    target += coeff * static_cast<int64_t>(env.at(var));
                check_pos(target);
                out->ops += static_cast<uint64_t>(std::abs(target - pos));
                pos = target;
                return;
            }
            case ir::NodeKind::ReadBit: {
                uint32_t bits = cell_bits_for_read(cell_at(pos));
                bool bit = (bits >> n.track) & 1u;
                ++out->ops;
                drift();
                run(n.kids[bit ? 0 : 1], env);
                return;
            }
            case ir::NodeKind::WriteBit: {
                bool bit = n.value < 0 ? flag_value(n.flag) : n.value != 0;
                write_track(n.track, bit);
                return;
            }
            case ir::NodeKind::WriteProjected: {
                uint32_t& cell = cell_at(pos);
                uint32_t bits = cell_bits_for_read(cell);
                bool bit = (bits >> n.track) & 1u;
                auto plain = tr.projection_plain(bit);
                if (!plain) throw std::runtime_error("projection without projection plains");
                cell = *plain;
                ++out->ops;
                drift();
                return;
            }
            case ir::NodeKind::ForStateIndex:
                for (uint32_t i = 0; i < n.bound && !done; ++i) {
                    env[n.var] = i;
                    run(n.kids[0], env);
                }
                env.erase(n.var);
                return;
            case ir::NodeKind::IfPred:
                if (n.pred(env)) run(n.kids[0], env);
                return;
            case ir::NodeKind::SetFlag:
                flag_set(n.flag, true);
                return;
            case ir::NodeKind::ClearFlag:
                flag_set(n.flag, false);
                return;
            case ir::NodeKind::IfFlag:
                run(n.kids[flag_value(n.flag) ? 0 : 1], env);
                return;
            case ir::NodeKind::WithFlag: {
                flags[n.flag].push_back(false);
                run(n.kids[0], env);
                flags[n.flag].pop_back();
                return;
            }
            case ir::NodeKind::LoopWhileFlag:
                do {
                    flag_set(n.flag, false);
                    run(n.kids[0], env);
                    if (done) return;
                } while (flag_value(n.flag));
                return;
            case ir::NodeKind::CallFixed:
                run(n.kids[0], env);
                return;
            case ir::NodeKind::Accept:
                out->exit = IrRunResult::Exit::Accepted;
                done = true;
                return;
            case ir::NodeKind::Reject:
                out->exit = IrRunResult::Exit::Rejected;
                done = true;
                return;
            case ir::NodeKind::ExitRight: {
                out->exit = IrRunResult::Exit::ExitedRight;
                out->exit_tag = n.tag;
                for (auto& [name, stack] : flags)
                    if (!stack.empty()) out->exit_flags[name] = stack.back();
                ++out->ops;
                done = true;
                return;
            }
            case ir::NodeKind::ShiftWindow:
                shift += n.shift;
                return;
        }
    }
};

}  // namespace

IrRunResult ir_interpret(const ir::NodePtr& program, const TrackAlphabet& tracks,
                         std::vector<uint32_t> window, int64_t entry_pos) {
    IrRunResult res;
    res.exit = IrRunResult::Exit::Accepted;  // fall-through matches the compiler
    Interp in{tracks, window, entry_pos, 0, static_cast<int64_t>(window.size()), {}, &res};
    ir::Env env;
    in.run(program, env);
    res.window = window;
    return res;
}

OneTapeDtm wr_from_visit_bounded(const OneTapeDtm& m, uint64_t k) {
    if (m.grading()) throw std::invalid_argument("machine already weight-reducing");
    if (k == 0) throw std::invalid_argument("visit bound must be positive");
    if (k >= (uint64_t(1) << 30)) throw std::invalid_argument("visit bound too large");
    OneTapeDtm out = m;
    out.set_grading(k);
    return out;
}

std::optional<VisitBoundViolation> verify_visit_bound(const OneTapeDtm& raw_machine, uint64_t k,
                                                      const std::vector<Word>& inputs,
                                                      uint64_t budget) {
    for (const Word& w : inputs) {
        RunResult r = run(raw_machine, w, budget);
        for (size_t i = 0; i < r.visits.size(); ++i)
            if (r.visits[i] > k)
                return VisitBoundViolation{w, r.visits_origin + static_cast<int64_t>(i),
                                           r.visits[i]};
    }
    return std::nullopt;
}

OneTapeDtm fold_to_hennie(const OneTapeDtm& m, uint64_t /*C*/) {
    if (m.end_marked()) throw std::invalid_argument("machine is already end-marked");
    if (m.pair_mode()) throw std::invalid_argument("machine is already folded");
    for (State s = 0; s < m.num_states(); ++s)
        if (m.view(s) != View::Whole) throw std::invalid_argument("foldable machines are whole-view");

    SymbolTable syms = m.syms();
    if (!syms.has_endmarkers()) syms.add_endmarkers();
    OneTapeDtm h(syms);
    const uint32_t n = m.num_states();
    // States (q, track): ids q and q + n. Track-1 states read slot 1 with
    // the machine's own geometry; track-2 states read slot 2 mirrored.
    for (uint32_t t = 0; t < 2; ++t)
        for (State q = 0; q < n; ++q) {
            State s = h.add_state(t == 0 ? View::Slot1 : View::Slot2);
            h.set_final(s, m.is_final(q));
            (void)s;
        }
    auto t1 = [&](State q) { return q; };
    auto t2 = [&](State q) { return q + n; };
    m.for_each_entry([&](State q, uint32_t base, const Trans& tr) {
        h.add_entry(t1(q), base, Trans{t1(tr.next), tr.write, tr.dir});
        h.add_entry(t2(q), base, Trans{t2(tr.next), tr.write, tr.dir == Dir::L ? Dir::R : Dir::L});
    });
    m.for_each_default([&](State q, Dir d, State next) {
        h.add_default(t1(q), d, t1(next));
        h.add_default(t2(q), d == Dir::L ? Dir::R : Dir::L, t2(next));
    });
    // Crossing the fold: any arrival at the left endmarker flips the track
    // selector and bounces right. The initial state is the track-2 copy so
    // that the mandatory first move lands on cell 1 reading track 1.
    for (State q = 0; q < n; ++q) {
        h.add_entry(t1(q), syms.lend(), Trans{t2(q), syms.lend(), Dir::R});
        h.add_entry(t2(q), syms.lend(), Trans{t1(q), syms.lend(), Dir::R});
    }
    h.set_initial(t2(m.initial()));
    h.set_end_marked(true);
    h.set_pair_mode(true);
    if (m.grading()) h.set_grading(m.grading()->k);
    h.finalize();
    return h;
}

}  // namespace nfa2tm
