#include "doctest.h"

#include <random>

#include "fixtures.hpp"
#include "nfa2tm/automata.hpp"

using namespace nfa2tm;

namespace {

// Deterministic generator helpers (the harness has richer ones; these stay
// local so the oracle tests depend on nothing but the automata module).
TwoWayNfa random_2nfa_local(uint32_t n, uint32_t seed, double density) {
    std::mt19937_64 rng(seed);
    auto chance = [&](double p) {
        return (rng() >> 11) * 0x1.0p-53 < p;
    };
    std::vector<State> finals;
    for (State q = 0; q < n; ++q)
        if (chance(0.4)) finals.push_back(q);
    TwoWayNfa a(n, Alphabet::ab(), 0, finals);
    for (State q = 0; q < n; ++q) {
        for (Symbol s = 0; s < a.num_ext_syms(); ++s) {
            for (State t = 0; t < n; ++t) {
                if (s == a.lend()) {
                    if (chance(density)) a.add_transition(q, s, t, Dir::R);
                    continue;
                }
                if (s == a.rend()) {
                    if (chance(density)) a.add_transition(q, s, t, Dir::L);
                    if (a.is_final(t) && chance(density)) a.add_transition(q, s, t, Dir::R);
                    continue;
                }
                if (chance(density)) a.add_transition(q, s, t, Dir::L);
                if (chance(density)) a.add_transition(q, s, t, Dir::R);
            }
        }
    }
    return a;
}

Word random_word(const Alphabet& al, std::mt19937_64& rng, uint32_t len) {
    Word w(len);
    for (auto& s : w) s = static_cast<Symbol>(rng() % al.size());
    return w;
}

}  // namespace

TEST_CASE("accepts_2nfa on the always-right automaton") {
    auto a = fixtures::always_right();
    CHECK(accepts_2nfa(a, a.alphabet().word_from_string("ab")));
    CHECK(accepts_2nfa(a, {}));
    CHECK(accepts_2nfa(a, a.alphabet().word_from_string("bbbb")));
}

TEST_CASE("accepts_2nfa rejects when stuck on the left endmarker") {
    auto a = fixtures::stuck_at_lend();
    CHECK_FALSE(accepts_2nfa(a, {}));
    CHECK_FALSE(accepts_2nfa(a, a.alphabet().word_from_string("a")));
    CHECK_FALSE(accepts_2nfa(a, a.alphabet().word_from_string("ba")));
}

TEST_CASE("fixed three-state 2NFA acceptance vector, lengths 1..4") {
    // Frozen output of the configuration-graph BFS, cross-checked against
    // accepts_via_tables below (both computed independently).
    const std::string expect = "000100011101000111111101110100";
    auto a = fixtures::three_state();
    std::string got, got_tables;
    for (uint32_t len = 1; len <= 4; ++len)
        for (const auto& w : all_words_of_length(a.alphabet(), len)) {
            got += accepts_2nfa(a, w) ? '1' : '0';
            got_tables += accepts_via_tables(a, w) ? '1' : '0';
        }
    CHECK(got == expect);
    CHECK(got_tables == expect);
    CHECK_FALSE(accepts_2nfa(a, {}));
}

TEST_CASE("accepts_2nfa validates the input word") {
    auto a = fixtures::three_state();
    CHECK_THROWS_AS(accepts_2nfa(a, Word{7}), std::invalid_argument);
}

TEST_CASE("accepts_1nfa basics") {
    auto k3 = fixtures::kth_from_end(3);
    auto& al = k3.alphabet();
    // Subset simulation by hand: {q0} -a-> {q0,q1} -b-> {q0,q2} -a->
    // {q0,q1,q3} -a-> {q0,q1,q2}; no final state, so "abaa" is rejected
    // (its third symbol from the end is 'b').
    CHECK_FALSE(accepts_1nfa(k3, al.word_from_string("abaa")));
    CHECK(accepts_1nfa(k3, al.word_from_string("aaaa")));
    CHECK(accepts_1nfa(k3, al.word_from_string("babb")));
    for (const auto& w : all_words_up_to(al, 6))
        CHECK(accepts_1nfa(k3, w) == fixtures::kth_from_end_pred(w, 3));

    OneWayNfa no_finals(2, Alphabet::ab(), 0, {});
    no_finals.add_transition(0, 0, 1);
    CHECK_FALSE(accepts_1nfa(no_finals, {}));
    CHECK_FALSE(accepts_1nfa(no_finals, al.word_from_string("a")));

    OneWayNfa eps(1, Alphabet::ab(), 0, {0});
    CHECK(accepts_1nfa(eps, {}));
}

TEST_CASE("gamma_tau_oracle on the always-right automaton") {
    auto a = fixtures::always_right();
    for (const auto& prefix :
         {TapePrefix::lend_only(a), TapePrefix::of_word(a, {0, 1}, false),
          TapePrefix::of_word(a, {1, 1, 0}, true)}) {
        auto t = gamma_tau_oracle(a, prefix);
        CHECK(t.gamma == 1u);
        CHECK(t.tau_rows == std::vector<uint32_t>{1u});
    }
}

TEST_CASE("gamma_tau_oracle rejects prefixes not starting with the left endmarker") {
    auto a = fixtures::three_state();
    TapePrefix bad;
    bad.ext = {Symbol{0}};
    CHECK_THROWS_AS(gamma_tau_oracle(a, bad), std::invalid_argument);
}

TEST_CASE("tables_for_lend matches the single-cell oracle") {
    for (uint32_t seed = 0; seed < 25; ++seed) {
        auto a = random_2nfa_local(4, 1000 + seed, 0.3);
        CHECK(tables_for_lend(a) == gamma_tau_oracle(a, TapePrefix::lend_only(a)));
    }
}

TEST_CASE("update_tables with no left moves is plain relational composition") {
    // sigma admits no left move from any state: tau' has exactly the direct
    // right-exits and gamma' stays empty when gamma was empty.
    TwoWayNfa a(2, Alphabet::ab(), 0, {1});
    a.add_transition(0, a.lend(), 0, Dir::R);
    a.add_transition(0, 0, 1, Dir::R);
    a.add_transition(1, 0, 1, Dir::R);
    ReachTables t;
    t.n = 2;
    t.gamma = 0;
    t.tau_rows = {0, 0};
    auto u = update_tables(a, t, 0);
    CHECK(u.gamma == 0);
    CHECK(u.tau_rows == std::vector<uint32_t>{2u, 2u});
}

TEST_CASE("update_tables fixpoint on the always-right automaton") {
    auto a = fixtures::always_right();
    auto t = tables_for_lend(a);
    for (int i = 0; i < 5; ++i) {
        t = update_tables(a, t, i % 2);
        CHECK(t.gamma == 1u);
        CHECK(t.tau_rows == std::vector<uint32_t>{1u});
    }
}

TEST_CASE("incremental tables equal the direct oracle on random prefixes") {
    std::mt19937_64 rng(42);
    int checked = 0;
    for (uint32_t seed = 0; seed < 40; ++seed) {
        auto a = random_2nfa_local(4, 2000 + seed, 0.3);
        for (int rep = 0; rep < 25; ++rep) {
            uint32_t len = 1 + rng() % 6;
            Word w = random_word(a.alphabet(), rng, len);
            bool rend = (rng() & 1) != 0;
            auto prefix = TapePrefix::of_word(a, w, rend);
            ReachTables inc = tables_for_lend(a);
            for (size_t i = 1; i < prefix.ext.size(); ++i)
                inc = update_tables(a, inc, prefix.ext[i]);
            CHECK(inc == gamma_tau_oracle(a, prefix));
            ++checked;
        }
    }
    CHECK(checked == 1000);
}

TEST_CASE("table soundness: accepts_via_tables equals accepts_2nfa") {
    // Exhaustive over |w| <= 6 for small random automata plus the fixtures,
    // then random larger cases.
    std::vector<TwoWayNfa> corpus;
    corpus.push_back(fixtures::always_right());
    corpus.push_back(fixtures::stuck_at_lend());
    corpus.push_back(fixtures::three_state());
    for (uint32_t n = 2; n <= 4; ++n)
        for (uint32_t seed = 0; seed < 4; ++seed)
            corpus.push_back(random_2nfa_local(n, n * 100 + seed, 0.3));
    for (const auto& a : corpus)
        for (const auto& w : all_words_up_to(a.alphabet(), 6))
            CHECK(accepts_via_tables(a, w) == accepts_2nfa(a, w));

    std::mt19937_64 rng(7);
    int checked = 0;
    for (int rep = 0; rep < 10000; ++rep) {
        const auto& a = corpus[3 + rng() % (corpus.size() - 3)];
        Word w = random_word(a.alphabet(), rng, 7 + rng() % 18);
        CHECK(accepts_via_tables(a, w) == accepts_2nfa(a, w));
        ++checked;
    }
    CHECK(checked == 10000);
}

TEST_CASE("Z_p saturation is monotone and stable at the fixpoint") {
    std::mt19937_64 rng(11);
    for (uint32_t seed = 0; seed < 30; ++seed) {
        auto a = random_2nfa_local(4, 3000 + seed, 0.35);
        Word w = random_word(a.alphabet(), rng, 3);
        auto t = gamma_tau_oracle(a, TapePrefix::of_word(a, w, false));
        for (State p = 0; p < a.num_states(); ++p) {
            for (Symbol s = 0; s < a.alphabet().size(); ++s) {
                auto c = z_p_closure(a, t, s, p);
                CHECK(c.passes <= a.num_states() + 1);
                // Re-running one extra pass from the fixpoint adds nothing.
                uint32_t grown = c.set;
                for (State r = 0; r < a.num_states(); ++r) {
                    if (!((c.set >> r) & 1u)) continue;
                    for (auto [sv, d] : a.moves(r, s))
                        if (d == Dir::L) grown |= t.tau_rows[sv];
                }
                CHECK(grown == c.set);
            }
        }
    }
}

TEST_CASE("endmarker discipline is rejected at construction time") {
    TwoWayNfa a(2, Alphabet::ab(), 0, {1});
    CHECK_THROWS_AS(a.add_transition(0, a.lend(), 1, Dir::L), std::invalid_argument);
    CHECK_THROWS_AS(a.add_transition(0, a.rend(), 0, Dir::R), std::invalid_argument);
    // Right move on the right endmarker into a final state is the accepting
    // exit and is legal.
    CHECK_NOTHROW(a.add_transition(0, a.rend(), 1, Dir::R));
    CHECK_NOTHROW(a.add_transition(0, a.rend(), 0, Dir::L));
}

TEST_CASE("ReachTables bit encoding round-trips and follows the bijection") {
    ReachTables t;
    t.n = 3;
    t.gamma = 0b101;
    t.tau_rows = {0b010, 0b000, 0b111};
    auto bits = t.to_bits();
    REQUIRE(bits.size() == 12);
    CHECK(bits[0] == 1);
    CHECK(bits[1] == 0);
    CHECK(bits[2] == 1);
    CHECK(bits[3 + 0 * 3 + 1] == 1);  // (0,1) in tau
    CHECK(bits[3 + 2 * 3 + 0] == 1);  // (2,0) in tau
    CHECK(ReachTables::from_bits(3, bits) == t);
}

TEST_CASE("short_string_classifier") {
    auto a = fixtures::three_state();
    SUBCASE("depth 0 is a two-state trie deciding only the empty word") {
        auto trie = short_string_classifier(a, 0);
        CHECK(trie.num_states() == 2);
        CHECK(accepts_1nfa(trie, {}) == accepts_2nfa(a, {}));
    }
    SUBCASE("depth 3 over a binary alphabet has at most 16 states") {
        auto trie = short_string_classifier(a, 3);
        CHECK(trie.num_states() == 16);  // (2^4-1)/(2-1) + 1
    }
    SUBCASE("agrees with the oracle on every word up to the depth") {
        for (uint32_t lmax = 0; lmax <= 3; ++lmax) {
            auto trie = short_string_classifier(a, lmax);
            CHECK(trie.num_states() <= ((1u << (lmax + 1)) - 1) + 1);
            for (const auto& w : all_words_up_to(a.alphabet(), lmax))
                CHECK(accepts_1nfa(trie, w) == accepts_2nfa(a, w));
        }
    }
}

TEST_CASE("size metric of an NFA") {
    auto k4 = fixtures::kth_from_end(4);
    CHECK(k4.size_metric() == 2u * 5 * 5);
}
