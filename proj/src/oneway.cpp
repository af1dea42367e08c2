#include <map>
#include <optional>

#include "construction_detail.hpp"

// Two-regime Hennie machine for a one-way NFA. A census selects by length:
// short inputs (m <= n) decide reachability in the one-way configuration
// graph by midpoint-halving recursion with activation records on a second
// track; longer inputs run the folded sliding-subset machine.

namespace nfa2tm {

namespace {

struct OFrame {
    uint8_t m;  // input length the record belongs to
    uint8_t p, q;
    uint8_t i, j;
    uint8_t res;  // 0 root, 1 first subcall, 2 second subcall
    auto key() const { return std::tuple(m, p, q, i, j, res); }
    bool operator<(const OFrame& o) const { return key() < o.key(); }
};

struct OState {
    enum Tag : uint8_t {
        ExecRead,
        WriteRec,
        GotoExecAdj,
        RetNav,
        RetErase,
        PopRead,   // depth, v, res, r
        Sub2Start, // depth, r
        Sub2Read,
        AdvStart,  // depth, r
        AdvRead,
        WalkLend,
        CountR,
        EdgeRead,  // aState, bState, x, then, else
        Accept,
        Reject,
    };
    Tag tag;
    int32_t a0 = 0, a1 = 0, a2 = 0, a3 = 0, a4 = 0;
    int32_t rec = -1;
    auto key() const { return std::tuple(tag, a0, a1, a2, a3, a4, rec); }
    bool operator<(const OState& o) const { return key() < o.key(); }
};

class OneWayMiddle {
public:
    OneWayMiddle(const OneWayNfa& norm, uint32_t short_max, OneTapeDtm* dtm,
                 const std::vector<uint32_t>& in_base)
        : a_(norm), dtm_(dtm), in_base_(in_base) {
        n_ = a_.num_states();
        short_max_ = short_max;
        enumerate_records();
    }

    const std::map<OFrame, uint32_t>& records() const { return rec_id_; }
    void attach(std::vector<uint32_t> rec_base, uint32_t empty_base) {
        rec_base_ = std::move(rec_base);
        empty_base_ = empty_base;
    }

    // Entry for length m >= 1, standing on the left endmarker about to move
    // right. Lengths needing no stack are decided by inline edge reads.
    State entry_for_length(uint32_t m) {
        if (m <= 2)
            return eval_inline(a_.initial(), 0, n_ - 1, m, accept(), reject());
        OFrame root = root_frame(m);
        OState ws{OState::WriteRec};
        ws.a0 = 1;
        ws.rec = static_cast<int32_t>(rec_id_.at(root));
        return state_of(ws);
    }

    // The inline entries start with navigation; give callers a state that
    // can be targeted directly from the endmarker bounce.
    State accept() { return state_of(OState{OState::Accept}); }
    State reject() { return state_of(OState{OState::Reject}); }

    void build() {
        while (!work_.empty()) {
            auto [os, s] = work_.back();
            work_.pop_back();
            expand(os, s);
        }
    }

private:
    OFrame root_frame(uint32_t m) const {
        return OFrame{static_cast<uint8_t>(m), static_cast<uint8_t>(a_.initial()),
                      static_cast<uint8_t>(n_ - 1), 0, static_cast<uint8_t>(m), 0};
    }

    void enumerate_records() {
        std::vector<std::pair<OFrame, uint32_t>> queue;
        auto admit = [&](const OFrame& f, uint32_t depth) {
            auto [it, fresh] = rec_id_.emplace(f, rec_id_.size());
            if (fresh) {
                depth_of_[it->second] = depth;
                queue.emplace_back(f, depth);
            } else if (depth_of_.at(it->second) != depth) {
                throw std::logic_error("one-way record reachable at two depths");
            }
        };
        for (uint32_t m = 3; m <= short_max_; ++m) admit(root_frame(m), 1);
        while (!queue.empty()) {
            auto [f, depth] = queue.back();
            queue.pop_back();
            uint32_t mid = (f.i + f.j) / 2;
            for (uint32_t r = 0; r < n_; ++r) {
                if (mid - f.i >= 3)
                    admit(OFrame{f.m, f.p, static_cast<uint8_t>(r), f.i,
                                 static_cast<uint8_t>(mid), 1},
                          depth + 1);
                if (f.j - mid >= 3)
                    admit(OFrame{f.m, static_cast<uint8_t>(r), f.q, static_cast<uint8_t>(mid),
                                 f.j, 2},
                          depth + 1);
            }
        }
        for (const auto& [f, id] : rec_id_) by_depth_[depth_of_.at(id)].emplace_back(f, id);
    }

    const std::vector<std::pair<OFrame, uint32_t>>& bucket(uint32_t depth) const {
        static const std::vector<std::pair<OFrame, uint32_t>> empty;
        auto it = by_depth_.find(depth);
        return it == by_depth_.end() ? empty : it->second;
    }

    State state_of(const OState& os) {
        auto it = memo_.find(os);
        if (it != memo_.end()) return it->second;
        View v = View::Slot1;
        switch (os.tag) {
            case OState::ExecRead:
            case OState::WriteRec:
            case OState::RetErase:
            case OState::PopRead:
            case OState::Sub2Read:
            case OState::AdvRead:
                v = View::Slot2;
                break;
            default:
                break;
        }
        State s = dtm_->add_state(v);
        if (os.tag == OState::Accept) dtm_->set_final(s, true);
        memo_.emplace(os, s);
        work_.emplace_back(os, s);
        return s;
    }

    State nav_to(uint32_t x, State cont) {
        State landing = cont;
        if (x > 1) {
            OState cr{OState::CountR};
            cr.a0 = static_cast<int32_t>(x) - 1;
            cr.a1 = static_cast<int32_t>(cont);
            landing = state_of(cr);
        }
        OState wl{OState::WalkLend};
        wl.a0 = static_cast<int32_t>(landing);
        return state_of(wl);
    }

    // Edge (sa, x-1) -> (sb, x): reads w_x at cell x.
    State edge_check(uint32_t sa, uint32_t x, uint32_t sb, State then_s, State else_s) {
        OState er{OState::EdgeRead};
        er.a0 = static_cast<int32_t>(sa);
        er.a1 = static_cast<int32_t>(sb);
        er.a2 = static_cast<int32_t>(x);
        er.a3 = static_cast<int32_t>(then_s);
        er.a4 = static_cast<int32_t>(else_s);
        return nav_to(x, state_of(er));
    }

    // Paths of length exactly y-x <= 2 from (sa,x) to (sb,y), inline.
    State eval_inline(uint32_t sa, uint32_t x, uint32_t sb, uint32_t y, State then_s,
                      State else_s) {
        uint32_t len = y - x;
        if (len == 0) return sa == sb ? then_s : else_s;
        if (len == 1) return edge_check(sa, y, sb, then_s, else_s);
        // len == 2: chain over midpoint states.
        State chain = else_s;
        for (uint32_t r2 = n_; r2-- > 0;) {
            State second = edge_check(r2, y, sb, then_s, chain);
            chain = edge_check(sa, x + 1, r2, second, chain);
        }
        return chain;
    }

    struct Go {
        State s;
        Dir d;
    };

    State ret(uint32_t depth, bool v) {
        OState rn{OState::RetNav};
        rn.a0 = static_cast<int32_t>(depth);
        rn.a1 = v;
        return state_of(rn);
    }

    Go sub1_dispatch(const OFrame& f, uint32_t depth, uint32_t r) {
        uint32_t mid = (f.i + f.j) / 2;
        OState s2{OState::Sub2Start};
        s2.a0 = static_cast<int32_t>(depth);
        s2.a1 = static_cast<int32_t>(r);
        State sub2 = state_of(s2);
        OState adv{OState::AdvStart};
        adv.a0 = static_cast<int32_t>(depth);
        adv.a1 = static_cast<int32_t>(r);
        State advance = state_of(adv);
        if (mid - f.i >= 3) {
            OFrame c{f.m, f.p, static_cast<uint8_t>(r), f.i, static_cast<uint8_t>(mid), 1};
            OState ws{OState::WriteRec};
            ws.a0 = static_cast<int32_t>(depth + 1);
            ws.rec = static_cast<int32_t>(rec_id_.at(c));
            return {state_of(ws), Dir::R};
        }
        return {eval_inline(f.p, f.i, r, mid, sub2, advance), Dir::L};
    }

    Go sub2_dispatch(const OFrame& f, uint32_t depth, uint32_t r) {
        uint32_t mid = (f.i + f.j) / 2;
        OState adv{OState::AdvStart};
        adv.a0 = static_cast<int32_t>(depth);
        adv.a1 = static_cast<int32_t>(r);
        State advance = state_of(adv);
        if (f.j - mid >= 3) {
            OFrame c{f.m, static_cast<uint8_t>(r), f.q, static_cast<uint8_t>(mid), f.j, 2};
            OState ws{OState::WriteRec};
            ws.a0 = static_cast<int32_t>(depth + 1);
            ws.rec = static_cast<int32_t>(rec_id_.at(c));
            return {state_of(ws), Dir::R};
        }
        return {eval_inline(r, mid, f.q, f.j, ret(depth, true), advance), Dir::L};
    }

    Go advance_from(const OFrame& f, uint32_t depth, uint32_t r) {
        if (r + 1 >= n_) return {ret(depth, false), Dir::L};
        return sub1_dispatch(f, depth, r + 1);
    }

    void expand(const OState& os, State s) {
        switch (os.tag) {
            case OState::ExecRead: {
                uint32_t depth = static_cast<uint32_t>(os.a0);
                for (const auto& [f, id] : bucket(depth)) {
                    Go target = sub1_dispatch(f, depth, 0);
                    dtm_->add_entry(s, rec_base_[id], Trans{target.s, rec_base_[id], target.d});
                }
                break;
            }
            case OState::WriteRec: {
                OState adj{OState::GotoExecAdj};
                adj.a0 = os.a0;
                State next = state_of(adj);
                uint32_t base = rec_base_[os.rec];
                dtm_->add_entry(s, dtm_->syms().blank(), Trans{next, base, Dir::L});
                dtm_->add_entry(s, empty_base_, Trans{next, base, Dir::L});
                break;
            }
            case OState::GotoExecAdj: {
                OState ex{OState::ExecRead};
                ex.a0 = os.a0;
                State target = state_of(ex);
                dtm_->add_default(s, Dir::R, target);
                dtm_->add_entry(s, dtm_->syms().lend(),
                                Trans{target, dtm_->syms().lend(), Dir::R});
                break;
            }
            case OState::RetNav: {
                OState re{OState::RetErase};
                re.a0 = os.a0;
                re.a1 = os.a1;
                State tgt = nav_to(static_cast<uint32_t>(os.a0), state_of(re));
                dtm_->add_default(s, Dir::L, tgt);
                dtm_->add_entry(s, dtm_->syms().lend(), Trans{tgt, dtm_->syms().lend(), Dir::R});
                break;
            }
            case OState::RetErase: {
                uint32_t depth = static_cast<uint32_t>(os.a0);
                bool v = os.a1 != 0;
                for (const auto& [f, id] : bucket(depth)) {
                    State target;
                    if (f.res == 0) {
                        target = v ? accept() : reject();
                    } else {
                        OState pr{OState::PopRead};
                        pr.a0 = static_cast<int32_t>(depth - 1);
                        pr.a1 = v;
                        pr.a2 = f.res;
                        pr.a3 = f.res == 1 ? f.q : f.p;  // recover the midpoint state
                        target = state_of(pr);
                    }
                    dtm_->add_entry(s, rec_base_[id], Trans{target, empty_base_, Dir::L});
                }
                break;
            }
            case OState::PopRead: {
                uint32_t depth = static_cast<uint32_t>(os.a0);
                bool v = os.a1 != 0;
                uint32_t res = static_cast<uint32_t>(os.a2);
                uint32_t r = static_cast<uint32_t>(os.a3);
                for (const auto& [f, id] : bucket(depth)) {
                    if (r >= n_) continue;
                    Go target;
                    if (res == 1)
                        target = v ? sub2_dispatch(f, depth, r) : advance_from(f, depth, r);
                    else
                        target = v ? Go{ret(depth, true), Dir::L} : advance_from(f, depth, r);
                    dtm_->add_entry(s, rec_base_[id], Trans{target.s, rec_base_[id], target.d});
                }
                break;
            }
            case OState::Sub2Start: {
                OState rd{OState::Sub2Read};
                rd.a0 = os.a0;
                rd.a1 = os.a1;
                State tgt = nav_to(static_cast<uint32_t>(os.a0), state_of(rd));
                dtm_->add_default(s, Dir::L, tgt);
                dtm_->add_entry(s, dtm_->syms().lend(), Trans{tgt, dtm_->syms().lend(), Dir::R});
                break;
            }
            case OState::Sub2Read: {
                uint32_t depth = static_cast<uint32_t>(os.a0);
                uint32_t r = static_cast<uint32_t>(os.a1);
                for (const auto& [f, id] : bucket(depth)) {
                    Go target = sub2_dispatch(f, depth, r);
                    dtm_->add_entry(s, rec_base_[id], Trans{target.s, rec_base_[id], target.d});
                }
                break;
            }
            case OState::AdvStart: {
                OState rd{OState::AdvRead};
                rd.a0 = os.a0;
                rd.a1 = os.a1;
                State tgt = nav_to(static_cast<uint32_t>(os.a0), state_of(rd));
                dtm_->add_default(s, Dir::L, tgt);
                dtm_->add_entry(s, dtm_->syms().lend(), Trans{tgt, dtm_->syms().lend(), Dir::R});
                break;
            }
            case OState::AdvRead: {
                uint32_t depth = static_cast<uint32_t>(os.a0);
                uint32_t r = static_cast<uint32_t>(os.a1);
                for (const auto& [f, id] : bucket(depth)) {
                    Go target = advance_from(f, depth, r);
                    dtm_->add_entry(s, rec_base_[id], Trans{target.s, rec_base_[id], target.d});
                }
                break;
            }
            case OState::WalkLend: {
                State cont = static_cast<State>(os.a0);
                dtm_->add_default(s, Dir::L, s);
                dtm_->add_entry(s, dtm_->syms().lend(), Trans{cont, dtm_->syms().lend(), Dir::R});
                break;
            }
            case OState::CountR: {
                State cont = static_cast<State>(os.a1);
                OState nx{OState::CountR};
                nx.a0 = os.a0 - 1;
                nx.a1 = os.a1;
                dtm_->add_default(s, Dir::R, os.a0 == 1 ? cont : state_of(nx));
                break;
            }
            case OState::EdgeRead: {
                State then_s = static_cast<State>(os.a3);
                State else_s = static_cast<State>(os.a4);
                for (Symbol sym = 0; sym < a_.alphabet().size(); ++sym) {
                    bool hit = (a_.targets(static_cast<State>(os.a0), sym) >>
                                static_cast<State>(os.a1)) & 1u;
                    dtm_->add_entry(s, in_base_[sym],
                                    Trans{hit ? then_s : else_s, in_base_[sym], Dir::L});
                }
                break;
            }
            case OState::Accept:
            case OState::Reject:
                break;
        }
    }

    const OneWayNfa& a_;
    OneTapeDtm* dtm_;
    std::vector<uint32_t> in_base_;
    uint32_t n_ = 0;
    uint32_t short_max_ = 0;
    std::map<OFrame, uint32_t> rec_id_;
    std::vector<uint32_t> rec_base_;
    uint32_t empty_base_ = 0;
    std::map<uint32_t, uint32_t> depth_of_;
    std::map<uint32_t, std::vector<std::pair<OFrame, uint32_t>>> by_depth_;
    std::map<OState, State> memo_;
    std::vector<std::pair<OState, State>> work_;
};

}  // namespace

ConstructionResult build_1nfa_to_dhm(const OneWayNfa& a) {
    const uint32_t n_orig = a.num_states();
    OneWayNfa norm = normalize_single_final(a);

    OneTapeDtm folded =
        fold_to_hennie(detail::build_1nfa_composite_raw(a), static_cast<uint64_t>(n_orig));
    SymbolTable syms = folded.syms();
    std::vector<uint32_t> in_base = syms.input_bases();

    OneWayMiddle pre(norm, n_orig, nullptr, in_base);  // record enumeration only
    std::vector<uint32_t> rec_base(pre.records().size(), 0);
    for (const auto& [f, id] : pre.records()) {
        std::string name = "orec(" + std::to_string(f.m) + "," + std::to_string(f.p) + "," +
                           std::to_string(f.i) + "," + std::to_string(f.q) + "," +
                           std::to_string(f.j) + "," + std::to_string(f.res) + ")";
        rec_base[id] = syms.add_work(std::move(name));
    }
    uint32_t empty_base = syms.add_work("recE");

    OneTapeDtm dtm(syms);
    dtm.set_end_marked(true);
    dtm.set_pair_mode(true);
    for (State s = 0; s < folded.num_states(); ++s) {
        State t = dtm.add_state(folded.view(s));
        dtm.set_final(t, folded.is_final(s));
        (void)t;
    }
    folded.for_each_entry([&](State s, uint32_t base, const Trans& t) { dtm.add_entry(s, base, t); });
    folded.for_each_default([&](State s, Dir d, State nx) { dtm.add_default(s, d, nx); });

    OneWayMiddle mid(norm, n_orig, &dtm, in_base);
    mid.attach(rec_base, empty_base);

    // Census: count cells up to n+1; short lengths rewind into the halving
    // decision, longer inputs rewind into the folded subset machine.
    std::vector<State> census(n_orig + 1);
    for (uint32_t i = 0; i <= n_orig; ++i) census[i] = dtm.add_state(View::Slot1);
    State longback = dtm.add_state(View::Slot1);
    State init = dtm.add_state(View::Slot1);
    dtm.set_initial(init);
    dtm.add_entry(init, syms.lend(), Trans{census[0], syms.lend(), Dir::R});
    dtm.set_final(census[0], accepts_1nfa(a, {}));  // halts on the right endmarker at m = 0

    std::map<uint32_t, State> shortback;
    for (uint32_t m = 1; m <= n_orig; ++m) {
        State sb = dtm.add_state(View::Slot1);
        for (Symbol s = 0; s < a.alphabet().size(); ++s)
            dtm.add_entry(sb, in_base[s], Trans{sb, in_base[s], Dir::L});
        dtm.add_entry(sb, syms.lend(), Trans{mid.entry_for_length(m), syms.lend(), Dir::R});
        shortback[m] = sb;
    }
    for (uint32_t i = 0; i <= n_orig; ++i) {
        for (Symbol s = 0; s < a.alphabet().size(); ++s) {
            if (i == n_orig)
                dtm.add_entry(census[i], in_base[s], Trans{longback, in_base[s], Dir::L});
            else
                dtm.add_entry(census[i], in_base[s], Trans{census[i + 1], in_base[s], Dir::R});
        }
        if (i >= 1) dtm.add_entry(census[i], syms.rend(), Trans{shortback.at(i), syms.rend(), Dir::L});
    }
    for (Symbol s = 0; s < a.alphabet().size(); ++s)
        dtm.add_entry(longback, in_base[s], Trans{longback, in_base[s], Dir::L});
    {
        const Trans* t = folded.lookup(folded.initial(), syms.lend());
        if (!t) throw std::logic_error("folded machine lacks its endmarker entry");
        dtm.add_entry(longback, syms.lend(), *t);
    }

    mid.build();
    dtm.finalize();
    return ConstructionResult{std::move(dtm), 0, 0};
}

}  // namespace nfa2tm
