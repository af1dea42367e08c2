#include "nfa2tm/constructions.hpp"

#include <deque>

#include "construction_detail.hpp"

namespace nfa2tm {

ConstructionResult build_2nfa_to_wrdtm(const TwoWayNfa& a, bool skip_wr_pass) {
    OneTapeDtm raw = detail::build_2nfa_composite_raw(a, /*compact=*/false);
    ConstructionResult res{std::move(raw), 0, 0};
    if (skip_wr_pass) return res;
    auto words = detail::calibration_words(
        a.alphabet(), detail::TableLayout{detail::LayoutKind::CompositeWide, a.num_states(), 0}
                          .window_len());
    res.visit_bound = detail::calibrate_visit_bound(res.machine, words);
    res.machine = wr_from_visit_bounded(res.machine, res.visit_bound);
    return res;
}

ConstructionResult build_2nfa_to_wrdhm_long(const TwoWayNfa& a, bool skip_wr_pass) {
    const uint64_t n = a.num_states();
    OneTapeDtm raw = detail::build_2nfa_composite_raw(a, /*compact=*/true);
    auto words = detail::calibration_words(
        a.alphabet(),
        detail::TableLayout{detail::LayoutKind::CompositeCompact, a.num_states(), 0}.window_len());
    ConstructionResult res{std::move(raw), 0, n * n};
    if (skip_wr_pass) {
        res.machine = fold_to_hennie(res.machine, n * n);
        return res;
    }
    res.visit_bound = detail::calibrate_visit_bound(res.machine, words);
    res.machine =
        fold_to_hennie(wr_from_visit_bounded(res.machine, res.visit_bound), n * n);
    return res;
}

ConstructionResult build_unary_2nfa_to_wrdhm(const TwoWayNfa& a, bool skip_wr_pass) {
    if (a.alphabet().size() != 1)
        throw std::invalid_argument("unary construction requires a one-letter alphabet");
    const uint32_t n = a.num_states();
    const uint32_t short_count = n * n;

    // X = lengths below n^2 accepted by the automaton, decided read-only.
    std::vector<bool> short_accept(short_count, false);
    for (uint32_t i = 0; i < short_count; ++i)
        short_accept[i] = accepts_2nfa(a, Word(i, 0));

    // Long regime: the folded compact composite, correct for |w| >= n^2.
    OneTapeDtm longm = fold_to_hennie(detail::build_2nfa_composite_raw(a, /*compact=*/true),
                                      static_cast<uint64_t>(n) * n);

    // Prefix phase: count input cells up to n^2 while sweeping right. Short
    // inputs are decided by the counter, long inputs rewind and hand over to
    // the embedded machine. Spliced in front of the folded machine's states.
    OneTapeDtm m(longm.syms());
    m.set_end_marked(true);
    m.set_pair_mode(true);
    for (State s = 0; s < longm.num_states(); ++s) {
        State t = m.add_state(longm.view(s));
        m.set_final(t, longm.is_final(s));
        (void)t;
    }
    longm.for_each_entry([&](State s, uint32_t base, const Trans& t) { m.add_entry(s, base, t); });
    longm.for_each_default([&](State s, Dir d, State nx) { m.add_default(s, d, nx); });

    const auto& syms = m.syms();
    uint32_t abase = syms.input_bases().at(0);
    std::vector<State> sweep(short_count + 1);
    for (uint32_t i = 0; i <= short_count; ++i) {
        sweep[i] = m.add_state(View::Slot1);
        if (i < short_count) m.set_final(sweep[i], short_accept[i]);
    }
    State back = m.add_state(View::Slot1);
    State init = m.add_state(View::Slot1);
    m.set_initial(init);
    m.set_final(init, accepts_2nfa(a, {}));
    m.add_entry(init, syms.lend(), Trans{sweep[0], syms.lend(), Dir::R});
    for (uint32_t i = 0; i < short_count; ++i)
        m.add_entry(sweep[i], abase, Trans{sweep[i + 1], abase, Dir::R});
    // Counter saturated: the input is long; rewind and simulate.
    m.add_entry(sweep[short_count], abase, Trans{back, abase, Dir::L});
    m.add_entry(sweep[short_count], syms.rend(), Trans{back, syms.rend(), Dir::L});
    m.add_entry(back, abase, Trans{back, abase, Dir::L});
    // Hand over exactly like the embedded machine's own start: its initial
    // state bounces off the left endmarker into the track-1 copy.
    {
        const Trans* t0 = longm.lookup(longm.initial(), syms.lend());
        if (!t0) throw std::logic_error("folded machine lacks its endmarker entry");
        m.add_entry(back, syms.lend(), *t0);
    }
    m.finalize();

    ConstructionResult res{std::move(m), 0, 0};
    if (skip_wr_pass) return res;
    // Grade the whole device: the sweep adds at most two extra steps per
    // cell on top of the embedded machine's bound.
    std::vector<Word> words;
    for (uint32_t i : {0u, 1u, 2u, short_count - 1, short_count, short_count + 1,
                       2 * short_count + 5})
        words.push_back(Word(i, 0));
    res.visit_bound = detail::calibrate_visit_bound(res.machine, words);
    res.machine = wr_from_visit_bounded(res.machine, res.visit_bound);
    return res;
}

ConstructionResult build_1nfa_to_wrdhm_long(const OneWayNfa& a, bool skip_wr_pass) {
    const uint64_t n = a.num_states();
    OneTapeDtm raw = detail::build_1nfa_composite_raw(a);
    ConstructionResult res{std::move(raw), 0, n};
    if (skip_wr_pass) {
        res.machine = fold_to_hennie(res.machine, n);
        return res;
    }
    auto words = detail::calibration_words(a.alphabet(), static_cast<int64_t>(n) + 1);
    res.visit_bound = detail::calibrate_visit_bound(res.machine, words);
    res.machine = fold_to_hennie(wr_from_visit_bounded(res.machine, res.visit_bound), n);
    return res;
}

bool construction_takes_2nfa(const std::string& name) {
    return name == "2nfa-wrdtm" || name == "2nfa-wrdhm-long" || name == "u2nfa-wrdhm" ||
           name == "2nfa-dhm";
}

ConstructionResult build_named_2nfa(const std::string& name, const TwoWayNfa& a,
                                    bool skip_wr_pass) {
    if (name == "2nfa-wrdtm") return build_2nfa_to_wrdtm(a, skip_wr_pass);
    if (name == "2nfa-wrdhm-long") return build_2nfa_to_wrdhm_long(a, skip_wr_pass);
    if (name == "u2nfa-wrdhm") return build_unary_2nfa_to_wrdhm(a, skip_wr_pass);
    if (name == "2nfa-dhm") return build_2nfa_to_dhm(a);
    throw std::invalid_argument("unknown construction: " + name);
}

ConstructionResult build_named_1nfa(const std::string& name, const OneWayNfa& a,
                                    bool skip_wr_pass) {
    if (name == "1nfa-wrdhm-long") return build_1nfa_to_wrdhm_long(a, skip_wr_pass);
    if (name == "1nfa-dhm") return build_1nfa_to_dhm(a);
    throw std::invalid_argument("unknown construction: " + name);
}

bool reachable_fn(const TwoWayNfa& a, const Word& w, State p, uint32_t i, State q, uint32_t j,
                  uint64_t t) {
    const uint32_t m = static_cast<uint32_t>(w.size());
    if (p == q && i == j) return true;
    if (t == 0) return false;
    auto sym_at = [&](uint32_t pos) -> Symbol {
        if (pos == 0) return a.lend();
        if (pos == m + 1) return a.rend();
        return w[pos - 1];
    };
    auto edge = [&](State x, uint32_t xi, State y, uint32_t yj) {
        if (xi > m + 1) return false;  // no moves from the exit node
        int d = static_cast<int>(yj) - static_cast<int>(xi);
        if (d != 1 && d != -1) return false;
        for (auto [tq, td] : a.moves(x, sym_at(xi)))
            if (tq == y && dir_delta(td) == d) return true;
        return false;
    };
    if (t == 1) return edge(p, i, q, j);
    for (State r = 0; r < a.num_states(); ++r)
        for (uint32_t l = 0; l <= m + 1; ++l)
            if (reachable_fn(a, w, p, i, r, l, t / 2) &&
                reachable_fn(a, w, r, l, q, j, t - t / 2))
                return true;
    return false;
}

bool config_reachable_bfs(const TwoWayNfa& a, const Word& w, State p, uint32_t i, State q,
                          uint32_t j, uint64_t t) {
    const uint32_t m = static_cast<uint32_t>(w.size());
    auto sym_at = [&](uint32_t pos) -> Symbol {
        if (pos == 0) return a.lend();
        if (pos == m + 1) return a.rend();
        return w[pos - 1];
    };
    // Bounded-depth BFS over (state, position 0..m+2).
    const uint32_t width = m + 3;
    std::vector<uint64_t> dist(a.num_states() * width, UINT64_MAX);
    std::deque<std::pair<State, uint32_t>> queue;
    dist[p * width + i] = 0;
    queue.emplace_back(p, i);
    while (!queue.empty()) {
        auto [x, xi] = queue.front();
        queue.pop_front();
        uint64_t d = dist[x * width + xi];
        if (x == q && xi == j) return true;
        if (d >= t || xi > m + 1) continue;
        for (auto [y, yd] : a.moves(x, sym_at(xi))) {
            int yj = static_cast<int>(xi) + dir_delta(yd);
            if (yj < 0 || yj > static_cast<int>(m) + 2) continue;
            size_t idx = y * width + yj;
            if (dist[idx] == UINT64_MAX) {
                dist[idx] = d + 1;
                queue.emplace_back(y, static_cast<uint32_t>(yj));
            }
        }
    }
    return false;
}

bool reachable_one_way_fn(const OneWayNfa& a, const Word& w, State p, uint32_t i, State q,
                          uint32_t j) {
    if (i == j) return p == q;
    if (j < i || j > w.size()) return false;
    if (j - i == 1) return (a.targets(p, w[j - 1]) >> q) & 1u;
    // Midpoint split; both halves are nonempty.
    uint32_t mid = (i + j) / 2;
    for (State r = 0; r < a.num_states(); ++r)
        if (reachable_one_way_fn(a, w, p, i, r, mid) && reachable_one_way_fn(a, w, r, mid, q, j))
            return true;
    return false;
}

TwoWayNfa normalize_single_final(const TwoWayNfa& a) {
    // One fresh final state q_f; every accepting exit (q,R) on the right
    // endmarker is rerouted into it. Language preserved: right moves on the
    // right endmarker always enter final states.
    const uint32_t n = a.num_states();
    TwoWayNfa out(n + 1, a.alphabet(), a.initial(), {n});
    for (State s = 0; s < n; ++s)
        for (Symbol x = 0; x < a.num_ext_syms(); ++x)
            for (auto [t, d] : a.moves(s, x)) {
                if (x == a.rend() && d == Dir::R)
                    out.add_transition(s, x, n, Dir::R);
                else
                    out.add_transition(s, x, t, d);
            }
    return out;
}

OneWayNfa normalize_single_final(const OneWayNfa& a) {
    // Fresh final state entered wherever some final state was entered.
    // Acceptance of the empty word is lost and must be special-cased.
    const uint32_t n = a.num_states();
    OneWayNfa out(n + 1, a.alphabet(), a.initial(), {n});
    for (State s = 0; s < n; ++s)
        for (Symbol x = 0; x < a.alphabet().size(); ++x) {
            uint32_t ts = a.targets(s, x);
            for (State t = 0; t < n; ++t)
                if ((ts >> t) & 1u) {
                    out.add_transition(s, x, t);
                    if (a.is_final(t)) out.add_transition(s, x, n);
                }
        }
    return out;
}

}  // namespace nfa2tm
