#include "nfa2tm/tape_machine.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace nfa2tm {

SymbolTable::SymbolTable() { add("_", BaseKind::Blank); }

uint32_t SymbolTable::add(std::string name, BaseKind kind) {
    if (kind == BaseKind::Blank && !names_.empty())
        throw std::invalid_argument("blank symbol already present");
    if (by_name_.count(name)) throw std::invalid_argument("duplicate symbol name: " + name);
    uint32_t id = static_cast<uint32_t>(names_.size());
    by_name_[name] = id;
    names_.push_back(std::move(name));
    kinds_.push_back(kind);
    if (kind == BaseKind::LEnd) lend_ = id;
    if (kind == BaseKind::REnd) rend_ = id;
    return id;
}

void SymbolTable::add_endmarkers() {
    add("<", BaseKind::LEnd);
    add(">", BaseKind::REnd);
}

std::optional<uint32_t> SymbolTable::find(const std::string& name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
}

std::vector<uint32_t> SymbolTable::input_bases() const {
    std::vector<uint32_t> out;
    for (uint32_t b = 0; b < size(); ++b)
        if (kinds_[b] == BaseKind::Input) out.push_back(b);
    return out;
}

const char* outcome_name(Outcome o) {
    switch (o) {
        case Outcome::Accepted: return "accepted";
        case Outcome::RejectedHalt: return "rejected_halt";
        case Outcome::DivergedDetected: return "diverged_detected";
        case Outcome::BudgetExhausted: return "budget_exhausted";
    }
    return "?";
}

uint64_t RunResult::max_visits() const {
    uint64_t m = 0;
    for (uint64_t v : visits) m = std::max(m, v);
    return m;
}

uint64_t RunResult::visits_at(int64_t cell) const {
    int64_t i = cell - visits_origin;
    if (i < 0 || i >= static_cast<int64_t>(visits.size())) return 0;
    return visits[i];
}

Cell RunResult::tape_at(int64_t cell) const {
    int64_t i = cell - tape_origin;
    if (i < 0 || i >= static_cast<int64_t>(tape.size())) return Cell{};
    return tape[i];
}

State OneTapeDtm::add_state(View v) {
    views_.push_back(v);
    finals_.push_back(0);
    defaults_.push_back({});
    return static_cast<State>(views_.size() - 1);
}

void OneTapeDtm::add_default(State s, Dir dir, State next) {
    if (s >= views_.size() || next >= views_.size())
        throw std::invalid_argument("default transition state out of range");
    defaults_.at(s) = DefaultT{true, dir, next};
}

uint64_t OneTapeDtm::num_defaults() const {
    uint64_t n = 0;
    for (const auto& d : defaults_)
        if (d.has) ++n;
    return n;
}

bool OneTapeDtm::resolve(State s, uint32_t viewed_base, Trans* out) const {
    if (const Trans* t = lookup(s, viewed_base)) {
        *out = *t;
        return true;
    }
    const DefaultT& d = defaults_[s];
    if (d.has && viewed_base != syms_.blank() && !syms_.is_endmark(viewed_base)) {
        *out = Trans{d.next, viewed_base, d.dir};
        return true;
    }
    return false;
}

State OneTapeDtm::add_states(uint32_t count, View v) {
    State first = static_cast<State>(views_.size());
    for (uint32_t i = 0; i < count; ++i) add_state(v);
    return first;
}

void OneTapeDtm::set_final(State s, bool f) { finals_.at(s) = f ? 1 : 0; }

void OneTapeDtm::set_state_name(State s, std::string name) {
    state_names_[s] = std::move(name);
}

const std::string& OneTapeDtm::state_name(State s) const {
    static const std::string empty;
    auto it = state_names_.find(s);
    return it == state_names_.end() ? empty : it->second;
}

void OneTapeDtm::add_entry(State s, uint32_t viewed_base, Trans t) {
    if (s >= views_.size() || t.next >= views_.size())
        throw std::invalid_argument("transition state out of range");
    if (viewed_base >= syms_.size() || t.write >= syms_.size())
        throw std::invalid_argument("transition symbol out of range");
    if (t.write == syms_.blank())
        throw std::invalid_argument("blank symbol cannot be written");
    finalized_ = false;
    pool_.push_back(Entry{s, viewed_base, t});
}

void OneTapeDtm::finalize() {
    std::sort(pool_.begin(), pool_.end(), [](const Entry& a, const Entry& b) {
        return a.state != b.state ? a.state < b.state : a.base < b.base;
    });
    // Duplicate keys with identical payloads collapse; conflicting payloads
    // mean the table is nondeterministic.
    std::vector<Entry> dedup;
    dedup.reserve(pool_.size());
    for (const Entry& e : pool_) {
        if (!dedup.empty() && dedup.back().state == e.state && dedup.back().base == e.base) {
            const Trans& p = dedup.back().t;
            if (p.next != e.t.next || p.write != e.t.write || p.dir != e.t.dir)
                throw std::runtime_error(
                    "nondeterministic table: state " + std::to_string(e.state) + " symbol " +
                    syms_.name(e.base));
            continue;
        }
        dedup.push_back(e);
    }
    pool_ = std::move(dedup);
    spans_.assign(views_.size(), {0, 0});
    size_t i = 0;
    while (i < pool_.size()) {
        size_t j = i;
        while (j < pool_.size() && pool_[j].state == pool_[i].state) ++j;
        spans_[pool_[i].state] = {static_cast<uint32_t>(i), static_cast<uint32_t>(j - i)};
        i = j;
    }
    finalized_ = true;
}

const Trans* OneTapeDtm::lookup(State s, uint32_t viewed_base) const {
    auto [off, len] = spans_[s];
    const Entry* e = pool_.data() + off;
    if (len <= 8) {
        for (uint32_t i = 0; i < len; ++i)
            if (e[i].base == viewed_base) return &e[i].t;
        return nullptr;
    }
    uint32_t lo = 0, hi = len;
    while (lo < hi) {
        uint32_t mid = (lo + hi) / 2;
        if (e[mid].base < viewed_base)
            lo = mid + 1;
        else
            hi = mid;
    }
    if (lo < len && e[lo].base == viewed_base) return &e[lo].t;
    return nullptr;
}

uint64_t OneTapeDtm::virtual_symbol_count() const {
    uint64_t singles = syms_.size();
    if (grading_) {
        // Pristine copies of every base plus k graded copies of each base
        // that some transition writes. Default transitions rewrite whatever
        // they read, so they make every eligible base writable.
        std::vector<uint8_t> written(syms_.size(), 0);
        for (const Entry& e : pool_)
            if (!syms_.is_endmark(e.t.write)) written[e.t.write] = 1;
        if (num_defaults() > 0)
            for (uint32_t b = 0; b < syms_.size(); ++b)
                if (b != syms_.blank() && !syms_.is_endmark(b)) written[b] = 1;
        uint64_t w = std::count(written.begin(), written.end(), 1);
        singles = syms_.size() + grading_->k * w;
    }
    if (pair_mode_) {
        // Pairs never hold an endmarker component; the two delimiters exist
        // only as whole cells.
        uint64_t pair_singles = singles - (syms_.has_endmarkers() ? 2 : 0);
        return singles + pair_singles * pair_singles;
    }
    return singles;
}

uint64_t OneTapeDtm::max_rank() const {
    if (grading_) {
        uint64_t k = grading_->k;
        return pair_mode_ ? 2 * k + 1 : k;
    }
    if (explicit_rank_) {
        uint64_t m = 0;
        for (uint64_t r : *explicit_rank_) m = std::max(m, r);
        return m;
    }
    return 0;
}

SizeReport OneTapeDtm::size_report() const {
    SizeReport r;
    r.states = num_states();
    r.work_symbols = virtual_symbol_count();
    r.base_transitions = pool_.size() + num_defaults();
    long double prod = static_cast<long double>(r.states) * r.work_symbols;
    uint64_t bits = static_cast<uint64_t>(std::ceil(std::log2(std::max<long double>(prod, 2))));
    r.size_metric = static_cast<uint64_t>(prod) >= (uint64_t(1) << 62)
                        ? UINT64_MAX
                        : r.states * r.work_symbols * bits;
    return r;
}

uint64_t nfa_size_metric(uint32_t num_states, uint32_t alphabet_size) {
    return static_cast<uint64_t>(alphabet_size) * num_states * num_states;
}

uint64_t OneTapeDtm::default_budget(size_t input_len) const {
    if (!has_wr_witness())
        throw std::invalid_argument("machine without weight-reducing witness needs an explicit budget");
    unsigned __int128 b = 64;
    b *= max_rank() + 2;
    b *= input_len + virtual_symbol_count() + num_states() + 4;
    const uint64_t cap = UINT64_MAX / 2;
    return b > cap ? cap : static_cast<uint64_t>(b);
}

namespace {

// Shared single-step semantics over a cell.
struct StepEffect {
    bool defined = false;
    Cell cell;
    State next = 0;
    Dir dir = Dir::R;
};

// Endmarker cells are hard delimiters: they present themselves on every
// view.
inline uint32_t viewed_base_of(const SymbolTable& syms, View v, const Cell& c, bool* bad_whole) {
    if (c.b2 == kNoBase && syms.is_endmark(c.b1)) return c.b1;
    switch (v) {
        case View::Whole:
            if (c.b2 != kNoBase) {
                *bad_whole = true;
                return 0;
            }
            return c.b1;
        case View::Slot1: return c.b1;
        case View::Slot2: return c.b2 == kNoBase ? syms.blank() : c.b2;
    }
    return 0;
}

inline StepEffect apply_step(const OneTapeDtm& m, State s, const Cell& c) {
    StepEffect eff;
    bool bad_whole = false;
    View v = m.view(s);
    uint32_t vb = viewed_base_of(m.syms(), v, c, &bad_whole);
    if (bad_whole) return eff;
    const bool endmark = m.syms().is_endmark(vb);
    const bool graded = m.grading().has_value();
    int64_t k = graded ? static_cast<int64_t>(m.grading()->k) : 0;
    int32_t cnt = (v == View::Slot2 && !endmark) ? c.c2 : c.c1;
    if (graded && !endmark && cnt == 0) return eff;  // countdown exhausted: halt
    Trans t;
    if (!m.resolve(s, vb, &t)) return eff;
    eff.defined = true;
    eff.cell = c;
    eff.next = t.next;
    eff.dir = t.dir;
    if (endmark) {
        // Endmarker cells stay whole regardless of the state's view.
        eff.cell = Cell{t.write, kNoBase, kPristine, kPristine};
        return eff;
    }
    int32_t ncnt = cnt;
    if (graded)
        ncnt = static_cast<int32_t>((cnt == kPristine ? k : cnt) - 1);
    switch (v) {
        case View::Whole:
            eff.cell.b1 = t.write;
            eff.cell.b2 = kNoBase;
            eff.cell.c1 = ncnt;
            eff.cell.c2 = kPristine;
            break;
        case View::Slot1:
            eff.cell.b1 = t.write;
            eff.cell.c1 = ncnt;
            break;
        case View::Slot2:
            eff.cell.b2 = t.write;
            eff.cell.c2 = ncnt;
            break;
    }
    return eff;
}

struct Tape {
    std::vector<Cell> cells;
    std::vector<uint64_t> visits;
    int64_t origin = 0;  // tape index of cells[0]

    void init(int64_t lo, int64_t hi) {
        origin = lo - 4;
        cells.assign(static_cast<size_t>(hi - lo + 9), Cell{});
        visits.assign(cells.size(), 0);
    }
    void ensure(int64_t pos) {
        if (pos < origin) {
            size_t grow = static_cast<size_t>(origin - pos) + cells.size();
            cells.insert(cells.begin(), grow, Cell{});
            visits.insert(visits.begin(), grow, 0);
            origin -= static_cast<int64_t>(grow);
        } else if (pos >= origin + static_cast<int64_t>(cells.size())) {
            size_t need = static_cast<size_t>(pos - origin) + 1 + cells.size();
            cells.resize(need, Cell{});
            visits.resize(need, 0);
        }
    }
    Cell& at(int64_t pos) { return cells[static_cast<size_t>(pos - origin)]; }
    uint64_t& visits_at(int64_t pos) { return visits[static_cast<size_t>(pos - origin)]; }
};

// Frontier-lasso divergence detector, one instance per direction. Fires when
// the head extends the non-blank frontier twice in the same state without
// retreating past the previous extension cell in between; by determinism the
// segment written in between then repeats forever.
struct SideLasso {
    bool have = false;
    State state = 0;
    int64_t cell = 0;
    int64_t inner = 0;  // min (right side) / max (left side) head pos since event
    bool right = true;

    bool on_event(State s, int64_t c, int64_t cur_inner) {
        bool fire = have && s == state &&
                    (right ? cur_inner >= cell : cur_inner <= cell);
        have = true;
        state = s;
        cell = c;
        return fire;
    }
};

}  // namespace

RunResult run(const OneTapeDtm& m, const Word& w, std::optional<uint64_t> budget_opt,
              bool capture_tape) {
    if (!m.finalized()) throw std::logic_error("machine not finalized");
    auto inputs = m.syms().input_bases();
    for (Symbol s : w)
        if (s >= inputs.size()) throw std::invalid_argument("symbol outside machine input alphabet");
    uint64_t budget = budget_opt ? *budget_opt : m.default_budget(w.size());

    const int64_t mlen = static_cast<int64_t>(w.size());
    Tape tape;
    int64_t init_lo = 0, init_hi;
    if (m.end_marked()) {
        if (!m.syms().has_endmarkers())
            throw std::logic_error("end-marked machine lacks endmarker symbols");
        init_hi = mlen + 1;
        tape.init(0, init_hi);
        tape.at(0).b1 = m.syms().lend();
        for (int64_t i = 0; i < mlen; ++i) tape.at(i + 1).b1 = inputs[w[i]];
        tape.at(mlen + 1).b1 = m.syms().rend();
    } else {
        init_hi = std::max<int64_t>(mlen, 1) - 1;
        tape.init(0, init_hi);
        for (int64_t i = 0; i < mlen; ++i) tape.at(i).b1 = inputs[w[i]];
    }

    // Current non-blank extent (cells outside it are untouched blanks).
    int64_t nb_lo = 0, nb_hi = m.end_marked() ? mlen + 1 : mlen - 1;
    SideLasso lasso_r{.right = true}, lasso_l{.right = false};
    int64_t inner_min = 0, inner_max = 0;

    RunResult res;
    State state = m.initial();
    int64_t head = 0;
    uint64_t steps = 0;
    Outcome out = Outcome::BudgetExhausted;
    while (steps < budget) {
        Cell& c = tape.at(head);
        bool fresh_r = head > nb_hi;
        bool fresh_l = head < nb_lo;
        if (fresh_r && lasso_r.on_event(state, head, inner_min)) {
            out = Outcome::DivergedDetected;
            break;
        }
        if (fresh_l && lasso_l.on_event(state, head, inner_max)) {
            out = Outcome::DivergedDetected;
            break;
        }
        StepEffect eff = apply_step(m, state, c);
        if (!eff.defined) {
            out = m.is_final(state) ? Outcome::Accepted : Outcome::RejectedHalt;
            break;
        }
        c = eff.cell;
        tape.visits_at(head)++;
        ++steps;
        nb_hi = std::max(nb_hi, head);
        nb_lo = std::min(nb_lo, head);
        if (fresh_r) inner_min = head;
        if (fresh_l) inner_max = head;
        head += dir_delta(eff.dir);
        if (m.end_marked() && (head < 0 || head > mlen + 1))
            throw std::logic_error("end-marked machine left the marked segment");
        tape.ensure(head);
        inner_min = std::min(inner_min, head);
        inner_max = std::max(inner_max, head);
        state = eff.next;
    }
    if (steps >= budget) out = Outcome::BudgetExhausted;

    res.outcome = out;
    res.steps = steps;
    res.final_state = state;
    // Trim the visit profile and count extra-space usage (cells where at
    // least one step was performed outside the initial segment).
    int64_t lo = 0, hi = static_cast<int64_t>(tape.visits.size()) - 1;
    while (lo <= hi && tape.visits[lo] == 0) ++lo;
    while (hi >= lo && tape.visits[hi] == 0) --hi;
    if (lo <= hi) {
        res.visits.assign(tape.visits.begin() + lo, tape.visits.begin() + hi + 1);
        res.visits_origin = tape.origin + lo;
        for (int64_t i = lo; i <= hi; ++i) {
            int64_t cell = tape.origin + i;
            if (tape.visits[i] == 0) continue;
            if (cell < init_lo) res.left_extra++;
            if (cell > init_hi) res.right_extra++;
        }
    }
    if (capture_tape) {
        int64_t tl = 0, th = static_cast<int64_t>(tape.cells.size()) - 1;
        auto blank = [&](int64_t i) {
            return tape.cells[i].b1 == m.syms().blank() && tape.cells[i].b2 == kNoBase;
        };
        while (tl <= th && blank(tl)) ++tl;
        while (th >= tl && blank(th)) --th;
        if (tl <= th) {
            res.tape.assign(tape.cells.begin() + tl, tape.cells.begin() + th + 1);
            res.tape_origin = tape.origin + tl;
        }
    }
    return res;
}

TmConfiguration initial_configuration(const OneTapeDtm& m, const Word& w) {
    auto inputs = m.syms().input_bases();
    TmConfiguration c;
    c.state = m.initial();
    c.head = 0;
    if (m.end_marked()) {
        c.tape[0] = Cell{m.syms().lend(), kNoBase, kPristine, kPristine};
        for (size_t i = 0; i < w.size(); ++i)
            c.tape[static_cast<int64_t>(i) + 1] = Cell{inputs.at(w[i]), kNoBase, kPristine, kPristine};
        c.tape[static_cast<int64_t>(w.size()) + 1] =
            Cell{m.syms().rend(), kNoBase, kPristine, kPristine};
    } else {
        for (size_t i = 0; i < w.size(); ++i)
            c.tape[static_cast<int64_t>(i)] = Cell{inputs.at(w[i]), kNoBase, kPristine, kPristine};
    }
    return c;
}

std::optional<TmConfiguration> step(const OneTapeDtm& m, const TmConfiguration& c) {
    Cell cur{};
    auto it = c.tape.find(c.head);
    if (it != c.tape.end()) cur = it->second;
    StepEffect eff = apply_step(m, c.state, cur);
    if (!eff.defined) return std::nullopt;
    TmConfiguration next = c;
    next.tape[c.head] = eff.cell;
    next.head += dir_delta(eff.dir);
    next.state = eff.next;
    return next;
}

WrWitness check_weight_reducing(const OneTapeDtm& m) {
    WrWitness w;
    if (m.grading()) {
        // Countdown machines are weight-reducing by construction: every
        // non-endmarker write strictly decreases the slot count, pair writes
        // decrease the component sum.
        w.kind = WrWitness::Kind::GradedRank;
        w.k = m.grading()->k;
        return w;
    }
    // Explicit rewrite graph over base symbols: edge read->written per
    // transition, endmarker self-rewrites exempt when end-marked. Default
    // transitions rewrite the symbol they read, so each eligible base gets a
    // self-loop (identity rewrites are never decreasing).
    const uint32_t nb = m.syms().size();
    std::vector<std::vector<uint32_t>> adj(nb);
    m.for_each_entry([&](State, uint32_t base, const Trans& t) {
        if (m.end_marked() && m.syms().is_endmark(base) && t.write == base) return;
        adj[base].push_back(t.write);
    });
    if (m.num_defaults() > 0)
        for (uint32_t b = 0; b < nb; ++b)
            if (b != m.syms().blank() && !m.syms().is_endmark(b)) adj[b].push_back(b);
    // Longest-path layering via DFS; a back edge yields the violation cycle.
    std::vector<int8_t> color(nb, 0);  // 0 white, 1 on stack, 2 done
    std::vector<uint64_t> rank(nb, 0);
    std::vector<uint32_t> stack, cycle;
    bool cyclic = false;
    auto dfs = [&](auto&& self, uint32_t u) -> void {
        color[u] = 1;
        stack.push_back(u);
        for (uint32_t v : adj[u]) {
            if (cyclic) return;
            if (color[v] == 1) {
                cyclic = true;
                auto it = std::find(stack.begin(), stack.end(), v);
                cycle.assign(it, stack.end());
                cycle.push_back(v);
                return;
            }
            if (color[v] == 0) self(self, v);
            if (cyclic) return;
            rank[u] = std::max(rank[u], rank[v] + 1);
        }
        color[u] = 2;
        stack.pop_back();
    };
    for (uint32_t u = 0; u < nb && !cyclic; ++u)
        if (color[u] == 0) dfs(dfs, u);
    if (cyclic) {
        w.kind = WrWitness::Kind::Violation;
        w.cycle = cycle;
        return w;
    }
    w.kind = WrWitness::Kind::ExplicitRank;
    w.base_rank = rank;
    return w;
}

bool rewrite_graph_has_cycle(const OneTapeDtm& m) {
    // Kahn peeling, independent of the DFS in check_weight_reducing.
    const uint32_t nb = m.syms().size();
    std::vector<std::vector<uint32_t>> adj(nb);
    std::vector<uint32_t> indeg(nb, 0);
    m.for_each_entry([&](State, uint32_t base, const Trans& t) {
        if (m.end_marked() && m.syms().is_endmark(base) && t.write == base) return;
        adj[base].push_back(t.write);
        indeg[t.write]++;
    });
    if (m.num_defaults() > 0)
        for (uint32_t b = 0; b < nb; ++b)
            if (b != m.syms().blank() && !m.syms().is_endmark(b)) {
                adj[b].push_back(b);
                indeg[b]++;
            }
    std::vector<uint32_t> queue;
    for (uint32_t u = 0; u < nb; ++u)
        if (indeg[u] == 0) queue.push_back(u);
    uint32_t seen = 0;
    while (!queue.empty()) {
        uint32_t u = queue.back();
        queue.pop_back();
        ++seen;
        for (uint32_t v : adj[u])
            if (--indeg[v] == 0) queue.push_back(v);
    }
    return seen != nb;
}

bool check_end_marked(const OneTapeDtm& m, std::string* why) {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    if (!m.end_marked()) return fail("machine is not flagged end-marked");
    if (!m.syms().has_endmarkers()) return fail("no endmarker symbols");
    bool ok = true;
    std::string msg;
    m.for_each_entry([&](State s, uint32_t base, const Trans& t) {
        if (!ok) return;
        if (base == m.syms().lend() && (t.write != base || t.dir != Dir::R)) {
            ok = false;
            msg = "state " + std::to_string(s) + " mishandles the left endmarker";
        }
        if (base == m.syms().rend() && (t.write != base || t.dir != Dir::L)) {
            ok = false;
            msg = "state " + std::to_string(s) + " mishandles the right endmarker";
        }
        if (!m.syms().is_endmark(base) && m.syms().is_endmark(t.write)) {
            ok = false;
            msg = "state " + std::to_string(s) + " writes an endmarker onto a regular cell";
        }
    });
    if (!ok) return fail(msg);
    return true;
}

}  // namespace nfa2tm
