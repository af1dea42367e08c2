#include "nfa2tm/report.hpp"

#include "nfa2tm/constructions.hpp"
#include "nfa2tm/formats.hpp"
#include "nfa2tm/harness.hpp"

namespace nfa2tm {

namespace {

std::string u64s(uint64_t v) { return std::to_string(v); }

}  // namespace

std::vector<ReportFile> standard_report(uint64_t seed) {
    std::vector<ReportFile> files;

    // Construction sizes over small state counts.
    {
        CsvWriter csv({"construction", "n", "states", "work_symbols", "base_transitions",
                       "size_metric"});
        auto add = [&](const std::string& name, uint32_t n, const OneTapeDtm& m) {
            auto rep = m.size_report();
            csv.row({name, u64s(n), u64s(rep.states), u64s(rep.work_symbols),
                     u64s(rep.base_transitions), u64s(rep.size_metric)});
        };
        for (uint32_t n = 2; n <= 4; ++n) {
            auto a = random_2nfa(GeneratorSpec{n, 2, 0.3, seed + n});
            add("2nfa-wrdtm", n, build_2nfa_to_wrdtm(a).machine);
            add("2nfa-wrdhm-long", n, build_2nfa_to_wrdhm_long(a).machine);
        }
        for (uint32_t n = 2; n <= 3; ++n) {
            auto u = random_unary_2nfa(GeneratorSpec{n, 1, 0.3, seed + 10 + n});
            add("u2nfa-wrdhm", n, build_unary_2nfa_to_wrdhm(u).machine);
        }
        for (uint32_t n = 2; n <= 5; ++n) {
            auto a = random_1nfa(GeneratorSpec{n, 2, 0.35, seed + 20 + n});
            add("1nfa-wrdhm-long", n, build_1nfa_to_wrdhm_long(a).machine);
        }
        files.push_back({"sizes.csv", csv.text()});
    }

    // Equivalence spot checks.
    {
        CsvWriter csv({"construction", "automaton", "n", "max_len", "words", "mismatches",
                       "in_guarantee_clean", "max_visits", "max_steps", "left_extra",
                       "right_extra"});
        auto check2 = [&](const std::string& label, const TwoWayNfa& a) {
            auto c = build_2nfa_to_wrdtm(a);
            EquivOptions opt;
            opt.max_len = 5;
            opt.guarantee_min_len = c.guarantee_min_len;
            auto rep = equiv_check([&](const Word& w) { return accepts_2nfa(a, w); },
                                   a.alphabet(), c.machine, opt);
            csv.row({"2nfa-wrdtm", label, u64s(a.num_states()), u64s(opt.max_len),
                     u64s(rep.words_tested), u64s(rep.mismatches.size()),
                     rep.in_guarantee_clean() ? "yes" : "no", u64s(rep.max_visits),
                     u64s(rep.max_steps), u64s(rep.max_left_extra), u64s(rep.max_right_extra)});
        };
        for (uint32_t i = 0; i < 3; ++i)
            check2("seed" + std::to_string(seed + i), random_2nfa(GeneratorSpec{3, 2, 0.3, seed + i}));
        check2("even-a", even_a_2nfa());
        check2("ping-pong", ping_pong_2nfa());
        files.push_back({"equiv.csv", csv.text()});
    }

    // Step/visit scaling of two weight-reducing machines.
    {
        CsvWriter csv({"machine", "len", "max_steps", "max_visits", "left_extra", "right_extra"});
        auto prof = [&](const std::string& name, const OneTapeDtm& m, const Alphabet& al) {
            for (const auto& row : profile_scaling(m, al, {16, 32, 64}, 3, seed, std::nullopt))
                csv.row({name, u64s(row.len), u64s(row.max_steps), u64s(row.max_visits),
                         u64s(row.max_left_extra), u64s(row.max_right_extra)});
        };
        auto a = even_a_2nfa();
        prof("even-a-wrdtm", build_2nfa_to_wrdtm(a).machine, a.alphabet());
        auto k3 = kth_from_end_nfa(3);
        prof("kth3-wrdhm", build_1nfa_to_wrdhm_long(k3).machine, k3.alphabet());
        files.push_back({"scaling.csv", csv.text()});
    }

    return files;
}

}  // namespace nfa2tm
