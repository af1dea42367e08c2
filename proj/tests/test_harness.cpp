#include "doctest.h"

#include "nfa2tm/constructions.hpp"
#include "nfa2tm/harness.hpp"

using namespace nfa2tm;

TEST_CASE("generators are deterministic and honor density") {
    GeneratorSpec spec{3, 2, 0.3, 42, false};
    auto a = random_2nfa(spec);
    auto b = random_2nfa(spec);
    for (State q = 0; q < 3; ++q)
        for (Symbol s = 0; s < a.num_ext_syms(); ++s)
            CHECK(a.moves(q, s) == b.moves(q, s));
    CHECK(a.final_mask() == b.final_mask());

    GeneratorSpec empty{3, 2, 0.0, 7, false};
    auto e = random_2nfa(empty);
    for (State q = 0; q < 3; ++q)
        for (Symbol s = 0; s < e.num_ext_syms(); ++s)
            CHECK(e.moves(q, s).empty());
    // Density zero rejects everything per the oracle.
    CHECK_FALSE(accepts_2nfa(e, {}));
    CHECK_FALSE(accepts_2nfa(e, e.alphabet().word_from_string("ab")));

    GeneratorSpec full{2, 2, 1.0, 7, false};
    auto f = random_2nfa(full);
    for (State q = 0; q < 2; ++q)
        for (Symbol s = 0; s < 2; ++s)
            CHECK(f.moves(q, s).size() == 4);  // every (target, dir)
}

TEST_CASE("witness families agree with the oracles") {
    for (uint32_t k : {2u, 3u, 4u}) {
        auto a = kth_from_end_nfa(k);
        for (const auto& w : all_words_up_to(a.alphabet(), 7))
            CHECK(accepts_1nfa(a, w) == kth_from_end_pred(w, k));
    }
    // "aab" with k = 3: the third symbol from the end is 'a'.
    CHECK(kth_from_end_pred(Alphabet::ab().word_from_string("aab"), 3));

    auto mod = unary_mod_2nfa(2, 0);
    for (uint32_t i = 0; i <= 12; ++i)
        CHECK(accepts_2nfa(mod, Word(i, 0)) == (i % 2 == 0));
    CHECK(accepts_2nfa(mod, Word(4, 0)));  // a^4 has even length

    auto pp = ping_pong_2nfa();
    for (const auto& w : all_words_up_to(pp.alphabet(), 6))
        CHECK(accepts_2nfa(pp, w) == ping_pong_pred(w));

    auto ev = even_a_2nfa();
    for (const auto& w : all_words_up_to(ev.alphabet(), 6))
        CHECK(accepts_2nfa(ev, w) == even_a_pred(w));

    auto lifted = lift_to_2nfa(kth_from_end_nfa(2));
    for (const auto& w : all_words_up_to(lifted.alphabet(), 6))
        CHECK(accepts_2nfa(lifted, w) == kth_from_end_pred(w, 2));
}

TEST_CASE("equiv_check finds mismatch witnesses and marks guarantees") {
    // Always-reject machine vs an automaton accepting the empty word.
    SymbolTable syms;
    syms.add_input("a");
    syms.add_input("b");
    OneTapeDtm rejecter(syms);
    rejecter.add_state();
    rejecter.set_initial(0);
    rejecter.finalize();

    auto ev = even_a_2nfa();  // accepts the empty word
    EquivOptions opt;
    opt.min_len = 0;
    opt.max_len = 2;
    opt.budget = 1000;
    auto rep = equiv_check([&](const Word& w) { return accepts_2nfa(ev, w); }, ev.alphabet(),
                           rejecter, opt);
    CHECK(rep.exhaustive);
    CHECK(rep.words_tested == 7);
    REQUIRE(!rep.mismatches.empty());
    CHECK(rep.mismatches.front().word.empty());  // witness is the empty word
    CHECK_FALSE(rep.in_guarantee_clean());

    // The same mismatches below the guarantee are reported but not failures.
    opt.guarantee_min_len = 100;
    auto rep2 = equiv_check([&](const Word& w) { return accepts_2nfa(ev, w); }, ev.alphabet(),
                            rejecter, opt);
    CHECK(!rep2.mismatches.empty());
    CHECK(rep2.in_guarantee_clean());
}

TEST_CASE("equiv_check agrees end to end on a built machine") {
    auto a = even_a_2nfa();
    auto c = build_2nfa_to_wrdtm(a);
    EquivOptions opt;
    opt.max_len = 6;
    opt.random_count = 50;
    opt.max_random_len = 24;
    opt.seed = 3;
    auto rep = equiv_check([&](const Word& w) { return even_a_pred(w); }, a.alphabet(),
                           c.machine, opt);
    CHECK(rep.mismatches.empty());
    CHECK(rep.inconclusive == 0);
    CHECK(rep.in_guarantee_clean());
    CHECK(rep.max_right_extra == 0);
}

TEST_CASE("profile_scaling rows are deterministic") {
    auto a = even_a_2nfa();
    auto c = build_2nfa_to_wrdtm(a);
    auto rows1 = profile_scaling(c.machine, a.alphabet(), {8, 16, 32}, 3, 11, std::nullopt);
    auto rows2 = profile_scaling(c.machine, a.alphabet(), {8, 16, 32}, 3, 11, std::nullopt);
    REQUIRE(rows1.size() == 3);
    for (size_t i = 0; i < rows1.size(); ++i) {
        CHECK(rows1[i].max_steps == rows2[i].max_steps);
        CHECK(rows1[i].max_visits == rows2[i].max_visits);
        CHECK(rows1[i].max_right_extra == 0);
    }
    // Weight-reducing: per-cell visits do not grow with the length.
    CHECK(rows1[2].max_visits <= rows1[1].max_visits * 2);
}

TEST_CASE("fit_power_law recovers exponents") {
    std::vector<std::pair<double, double>> pts;
    for (double x : {2.0, 3.0, 4.0, 5.0}) pts.emplace_back(x, 7.0 * x * x * x);
    auto f = fit_power_law(pts);
    CHECK(f.d == doctest::Approx(3.0).epsilon(0.01));
    CHECK(f.c == doctest::Approx(7.0).epsilon(0.05));
}

TEST_CASE("weight-reducing outputs have length-independent per-cell visits") {
    // Fixed periodic content, lengths past the sliding window's span: the
    // per-cell maximum must not move at all.
    auto a = even_a_2nfa();  // n = 2: window span 7
    auto c = build_2nfa_to_wrdtm(a);
    auto rows = profile_scaling(c.machine, a.alphabet(), {10, 50, 100, 200}, 3, 0, std::nullopt);
    for (size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].max_visits == rows[0].max_visits);

    auto b = random_2nfa(GeneratorSpec{4, 2, 0.3, 2});  // window span 21
    auto cb = build_2nfa_to_wrdtm(b);
    auto rb = profile_scaling(cb.machine, b.alphabet(), {25, 50, 100, 200}, 3, 0, std::nullopt);
    for (size_t i = 1; i < rb.size(); ++i) CHECK(rb[i].max_visits == rb[0].max_visits);
    // Shorter inputs cannot exceed the saturated maximum.
    auto rshort = profile_scaling(cb.machine, b.alphabet(), {10}, 3, 0, std::nullopt);
    CHECK(rshort[0].max_visits <= rb[0].max_visits);
}

TEST_CASE("double-oracle consistency over the witness corpus") {
    for (const auto& fam : witness_families()) {
        if (std::holds_alternative<TwoWayNfa>(fam.automaton)) {
            const auto& a = std::get<TwoWayNfa>(fam.automaton);
            uint32_t depth = a.alphabet().size() == 1 ? 12 : 6;
            for (const auto& w : all_words_up_to(a.alphabet(), depth))
                CHECK_MESSAGE(accepts_2nfa(a, w) == fam.predicate(w), fam.name);
        } else {
            const auto& a = std::get<OneWayNfa>(fam.automaton);
            for (const auto& w : all_words_up_to(a.alphabet(), 6))
                CHECK_MESSAGE(accepts_1nfa(a, w) == fam.predicate(w), fam.name);
        }
    }
}
