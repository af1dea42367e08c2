#include "nfa2tm/harness.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <thread>

namespace nfa2tm {

uint64_t DetRng::next() {
    // splitmix64: portable and deterministic.
    s_ += 0x9e3779b97f4a7c15ull;
    uint64_t z = s_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

uint32_t DetRng::below(uint32_t bound) { return static_cast<uint32_t>(next() % bound); }

bool DetRng::chance(double p) { return (next() >> 11) * 0x1.0p-53 < p; }

TwoWayNfa random_2nfa(const GeneratorSpec& spec) {
    DetRng rng(spec.seed * 2654435761u + spec.n);
    std::vector<State> finals;
    for (State q = 0; q < spec.n; ++q)
        if (rng.chance(0.4)) finals.push_back(q);
    std::vector<std::string> names;
    for (uint32_t i = 0; i < spec.alphabet_size; ++i) names.push_back(std::string(1, 'a' + i));
    TwoWayNfa a(spec.n, Alphabet(names), 0, finals);
    for (State q = 0; q < spec.n; ++q)
        for (Symbol s = 0; s < a.num_ext_syms(); ++s)
            for (State t = 0; t < spec.n; ++t) {
                if (s == a.lend()) {
                    if (rng.chance(spec.density)) a.add_transition(q, s, t, Dir::R);
                    continue;
                }
                if (s == a.rend()) {
                    if (rng.chance(spec.density)) a.add_transition(q, s, t, Dir::L);
                    if (a.is_final(t) && rng.chance(spec.density))
                        a.add_transition(q, s, t, Dir::R);
                    continue;
                }
                if (rng.chance(spec.density)) a.add_transition(q, s, t, Dir::L);
                if (rng.chance(spec.density)) a.add_transition(q, s, t, Dir::R);
            }
    return a;
}

TwoWayNfa random_unary_2nfa(GeneratorSpec spec) {
    spec.alphabet_size = 1;
    spec.unary = true;
    DetRng rng(spec.seed * 0x9e3779b9u + 7u * spec.n);
    std::vector<State> finals;
    for (State q = 0; q < spec.n; ++q)
        if (rng.chance(0.4)) finals.push_back(q);
    TwoWayNfa a(spec.n, Alphabet::unary(), 0, finals);
    for (State q = 0; q < spec.n; ++q)
        for (State t = 0; t < spec.n; ++t) {
            if (rng.chance(0.5)) a.add_transition(q, a.lend(), t, Dir::R);
            if (rng.chance(spec.density)) a.add_transition(q, 0, t, Dir::L);
            if (rng.chance(spec.density)) a.add_transition(q, 0, t, Dir::R);
            if (rng.chance(spec.density)) a.add_transition(q, a.rend(), t, Dir::L);
            if (a.is_final(t) && rng.chance(0.4)) a.add_transition(q, a.rend(), t, Dir::R);
        }
    return a;
}

OneWayNfa random_1nfa(const GeneratorSpec& spec) {
    DetRng rng(spec.seed * 0x2545f491u + spec.n);
    std::vector<State> finals;
    for (State q = 0; q < spec.n; ++q)
        if (rng.chance(0.4)) finals.push_back(q);
    std::vector<std::string> names;
    for (uint32_t i = 0; i < spec.alphabet_size; ++i) names.push_back(std::string(1, 'a' + i));
    OneWayNfa a(spec.n, Alphabet(names), 0, finals);
    for (State q = 0; q < spec.n; ++q)
        for (Symbol s = 0; s < spec.alphabet_size; ++s)
            for (State t = 0; t < spec.n; ++t)
                if (rng.chance(spec.density)) a.add_transition(q, s, t);
    return a;
}

OneWayNfa kth_from_end_nfa(uint32_t k) {
    OneWayNfa a(k + 1, Alphabet::ab(), 0, {k});
    a.add_transition(0, 0, 0);
    a.add_transition(0, 1, 0);
    a.add_transition(0, 0, 1);
    for (uint32_t i = 1; i < k; ++i) {
        a.add_transition(i, 0, i + 1);
        a.add_transition(i, 1, i + 1);
    }
    return a;
}

bool kth_from_end_pred(const Word& w, uint32_t k) {
    return w.size() >= k && w[w.size() - k] == 0;
}

TwoWayNfa unary_mod_2nfa(uint32_t p, uint32_t r) {
    TwoWayNfa a(p, Alphabet::unary(), 0, {r});
    a.add_transition(0, a.lend(), 0, Dir::R);
    for (uint32_t i = 0; i < p; ++i) a.add_transition(i, 0, (i + 1) % p, Dir::R);
    a.add_transition(r, a.rend(), r, Dir::R);
    return a;
}

TwoWayNfa ping_pong_2nfa() {
    // States: 0 start, 1 check-first, 2 run-right, 3 check-last, 4 run-to-end
    // (final). Sweeps right, bounces on the right endmarker to inspect the
    // last symbol, then returns to the right endmarker to exit.
    TwoWayNfa a(5, Alphabet::ab(), 0, {4});
    Symbol sa = 0, sb = 1;
    a.add_transition(0, a.lend(), 1, Dir::R);
    a.add_transition(1, sa, 2, Dir::R);  // first symbol must be 'a'
    a.add_transition(2, sa, 2, Dir::R);
    a.add_transition(2, sb, 2, Dir::R);
    a.add_transition(2, a.rend(), 3, Dir::L);
    a.add_transition(3, sa, 4, Dir::R);  // last symbol must be 'a'
    a.add_transition(4, a.rend(), 4, Dir::R);
    return a;
}

bool ping_pong_pred(const Word& w) { return !w.empty() && w.front() == 0 && w.back() == 0; }

TwoWayNfa even_a_2nfa() {
    TwoWayNfa a(2, Alphabet::ab(), 0, {0});
    a.add_transition(0, a.lend(), 0, Dir::R);
    a.add_transition(0, 0, 1, Dir::R);
    a.add_transition(1, 0, 0, Dir::R);
    a.add_transition(0, 1, 0, Dir::R);
    a.add_transition(1, 1, 1, Dir::R);
    a.add_transition(0, a.rend(), 0, Dir::R);
    return a;
}

bool even_a_pred(const Word& w) {
    return std::count(w.begin(), w.end(), Symbol{0}) % 2 == 0;
}

std::vector<WitnessFamily> witness_families() {
    std::vector<WitnessFamily> out;
    for (uint32_t k : {2u, 3u, 4u, 5u})
        out.push_back({"kth-from-end-" + std::to_string(k), kth_from_end_nfa(k),
                       [k](const Word& w) { return kth_from_end_pred(w, k); }});
    for (uint32_t p : {2u, 3u})
        for (uint32_t r = 0; r < p; ++r)
            out.push_back({"unary-mod-" + std::to_string(p) + "-" + std::to_string(r),
                           unary_mod_2nfa(p, r),
                           [p, r](const Word& w) { return w.size() % p == r; }});
    out.push_back({"ping-pong", ping_pong_2nfa(), ping_pong_pred});
    out.push_back({"even-a", even_a_2nfa(), even_a_pred});
    return out;
}

TwoWayNfa lift_to_2nfa(const OneWayNfa& a) {
    TwoWayNfa out(a.num_states(), a.alphabet(), a.initial(), a.finals());
    out.add_transition(a.initial(), out.lend(), a.initial(), Dir::R);
    for (State q = 0; q < a.num_states(); ++q) {
        for (Symbol s = 0; s < a.alphabet().size(); ++s) {
            uint32_t ts = a.targets(q, s);
            for (State t = 0; t < a.num_states(); ++t)
                if ((ts >> t) & 1u) out.add_transition(q, s, t, Dir::R);
        }
        if (a.is_final(q)) out.add_transition(q, out.rend(), q, Dir::R);
    }
    return out;
}

namespace {

Word nth_word(const Alphabet& al, uint32_t len, uint64_t index) {
    Word w(len);
    for (uint32_t i = len; i-- > 0;) {
        w[i] = static_cast<Symbol>(index % al.size());
        index /= al.size();
    }
    return w;
}

Word random_word(const Alphabet& al, DetRng& rng, uint32_t len) {
    Word w(len);
    for (auto& s : w) s = rng.below(al.size());
    return w;
}

}  // namespace

EquivReport equiv_check(const Oracle& oracle, const Alphabet& alphabet, const OneTapeDtm& m,
                        const EquivOptions& opt) {
    EquivReport rep;
    rep.min_len = opt.min_len;
    rep.max_len = opt.max_len;

    // Assemble the word list up front; lengths ascending, lexicographic
    // within a length, random samples after the exhaustive sweep.
    std::vector<Word> words;
    bool exhaustive = true;
    uint32_t overflow_len = opt.max_len + 1;
    for (uint32_t len = opt.min_len; len <= opt.max_len; ++len) {
        double count = std::pow(static_cast<double>(alphabet.size()), len);
        if (count > static_cast<double>(opt.exhaustive_ceiling)) {
            exhaustive = false;
            overflow_len = len;
            break;
        }
        uint64_t total = static_cast<uint64_t>(count);
        for (uint64_t i = 0; i < total; ++i) words.push_back(nth_word(alphabet, len, i));
    }
    rep.exhaustive = exhaustive && opt.random_count == 0;
    uint64_t random_count = opt.random_count;
    uint32_t rand_lo = opt.min_len;
    uint32_t rand_hi = std::max(opt.max_random_len, rand_lo);
    if (!exhaustive && random_count == 0) {
        // Past the exhaustive ceiling the remaining lengths are sampled, a
        // range with no tested words is never silently reported clean.
        random_count = 1000;
        rand_lo = overflow_len;
        rand_hi = opt.max_len;
    }
    if (random_count > 0) {
        DetRng rng(opt.seed);
        for (uint64_t i = 0; i < random_count; ++i) {
            uint32_t len = rand_lo + rng.below(rand_hi - rand_lo + 1);
            words.push_back(random_word(alphabet, rng, len));
        }
    }

    struct Slot {
        uint8_t oracle = 0, machine = 0, inconclusive = 0;
        uint64_t steps = 0, visits = 0, lx = 0, rx = 0;
    };
    std::vector<Slot> slots(words.size());
    uint32_t nthreads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
    nthreads = std::min<uint32_t>(nthreads, 8);
    std::atomic<size_t> cursor{0};
    auto worker = [&]() {
        for (;;) {
            size_t i = cursor.fetch_add(1);
            if (i >= words.size()) return;
            const Word& w = words[i];
            Slot& sl = slots[i];
            sl.oracle = oracle(w) ? 1 : 0;
            RunResult r = run(m, w, opt.budget);
            sl.machine = r.accepted() ? 1 : 0;
            sl.inconclusive = r.outcome == Outcome::BudgetExhausted ? 1 : 0;
            sl.steps = r.steps;
            sl.visits = r.max_visits();
            sl.lx = r.left_extra;
            sl.rx = r.right_extra;
        }
    };
    if (nthreads <= 1 || words.size() < 32) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (uint32_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    rep.words_tested = words.size();
    for (size_t i = 0; i < words.size(); ++i) {
        const Slot& sl = slots[i];
        rep.inconclusive += sl.inconclusive;
        rep.max_steps = std::max(rep.max_steps, sl.steps);
        rep.max_visits = std::max(rep.max_visits, sl.visits);
        rep.max_left_extra = std::max(rep.max_left_extra, sl.lx);
        rep.max_right_extra = std::max(rep.max_right_extra, sl.rx);
        if (!sl.inconclusive && sl.oracle != sl.machine) {
            Mismatch mm;
            mm.word = words[i];
            mm.oracle_accepts = sl.oracle;
            mm.machine_accepts = sl.machine;
            mm.in_guarantee = words[i].size() >= opt.guarantee_min_len;
            rep.mismatches.push_back(std::move(mm));
        }
    }
    return rep;
}

std::vector<ScalingRow> profile_scaling(const OneTapeDtm& m, const Alphabet& alphabet,
                                        const std::vector<uint32_t>& lengths, uint32_t samples,
                                        uint64_t seed, std::optional<uint64_t> budget) {
    std::vector<ScalingRow> rows;
    for (uint32_t len : lengths) {
        DetRng rng(seed ^ (uint64_t(len) << 32));
        ScalingRow row;
        row.len = len;
        // The first samples are fixed periodic patterns, so per-cell maxima
        // are comparable across lengths (content held fixed); any further
        // samples are seeded random words.
        std::vector<Word> words;
        for (uint32_t p = 0; p < std::min(samples, 3u); ++p) {
            Word w(len, 0);
            for (uint32_t i = 0; i < len; ++i)
                w[i] = static_cast<Symbol>((i / (p + 1)) % alphabet.size());
            words.push_back(std::move(w));
        }
        for (uint32_t i = 3; i < samples; ++i) words.push_back(random_word(alphabet, rng, len));
        for (const Word& w : words) {
            RunResult r = run(m, w, budget);
            if (r.outcome == Outcome::BudgetExhausted)
                throw std::runtime_error("profiling run exhausted its budget");
            row.max_steps = std::max(row.max_steps, r.steps);
            row.max_visits = std::max(row.max_visits, r.max_visits());
            row.max_left_extra = std::max(row.max_left_extra, r.left_extra);
            row.max_right_extra = std::max(row.max_right_extra, r.right_extra);
        }
        rows.push_back(row);
    }
    return rows;
}

PowerFit fit_power_law(const std::vector<std::pair<double, double>>& points) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    double n = static_cast<double>(points.size());
    for (auto [x, y] : points) {
        double lx = std::log(x), ly = std::log(std::max(y, 1e-9));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    PowerFit f;
    f.d = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    f.c = std::exp((sy - f.d * sx) / n);
    return f;
}

}  // namespace nfa2tm
