#include "doctest.h"

#include <random>

#include "nfa2tm/tape_machine.hpp"

using namespace nfa2tm;

namespace {

// One input symbol 'a', one work symbol 'x'.
SymbolTable basic_syms() {
    SymbolTable t;
    t.add_input("a");
    t.add_work("x");
    return t;
}

}  // namespace

TEST_CASE("machine with no transitions accepts or rejects in zero steps") {
    SymbolTable syms = basic_syms();
    OneTapeDtm m(syms);
    State q0 = m.add_state();
    m.set_initial(q0);
    m.set_final(q0);
    m.finalize();
    auto r = run(m, {0, 0}, 100);
    CHECK(r.outcome == Outcome::Accepted);
    CHECK(r.steps == 0);
    CHECK(r.visits.empty());
    CHECK(r.left_extra == 0);
    CHECK(r.right_extra == 0);

    OneTapeDtm m2(basic_syms());
    State p = m2.add_state();
    m2.set_initial(p);
    m2.finalize();
    auto r2 = run(m2, {0}, 100);
    CHECK(r2.outcome == Outcome::RejectedHalt);
    CHECK(r2.steps == 0);
}

TEST_CASE("single transition machine via step()") {
    SymbolTable syms;
    uint32_t a = syms.add_input("a");
    uint32_t b = syms.add_work("b");
    OneTapeDtm m(syms);
    State q0 = m.add_state();
    State q1 = m.add_state();
    m.set_initial(q0);
    m.add_entry(q0, a, Trans{q1, b, Dir::R});
    m.finalize();

    auto c = initial_configuration(m, {0});
    auto n = step(m, c);
    REQUIRE(n.has_value());
    CHECK(n->state == q1);
    CHECK(n->head == 1);
    CHECK(n->tape.at(0).b1 == b);
    // delta undefined at (q1, blank): halt.
    CHECK_FALSE(step(m, *n).has_value());
}

TEST_CASE("blank can never be written") {
    SymbolTable syms = basic_syms();
    OneTapeDtm m(syms);
    State q0 = m.add_state();
    m.set_initial(q0);
    CHECK_THROWS_AS(m.add_entry(q0, 1, Trans{q0, syms.blank(), Dir::R}), std::invalid_argument);
}

TEST_CASE("run fills the visit profile and steps equals its sum") {
    // Walks right over the input rewriting a -> x, then halts on blank.
    SymbolTable syms = basic_syms();
    uint32_t a = *syms.find("a");
    uint32_t x = *syms.find("x");
    OneTapeDtm m(syms);
    State q0 = m.add_state();
    m.set_initial(q0);
    m.set_final(q0);
    m.add_entry(q0, a, Trans{q0, x, Dir::R});
    m.finalize();
    auto r = run(m, {0, 0, 0}, 100);
    CHECK(r.outcome == Outcome::Accepted);
    CHECK(r.steps == 3);
    uint64_t sum = 0;
    for (auto v : r.visits) sum += v;
    CHECK(sum == r.steps);
    CHECK(r.visits_at(0) == 1);
    CHECK(r.visits_at(2) == 1);
    CHECK(r.visits_at(3) == 0);  // halts there without stepping
    CHECK(r.right_extra == 0);
}

TEST_CASE("budget exhaustion is reported, never silently treated as reject") {
    // Ping-pongs between two cells forever (not weight-reducing).
    SymbolTable syms = basic_syms();
    uint32_t a = *syms.find("a");
    uint32_t x = *syms.find("x");
    OneTapeDtm m(syms);
    State q0 = m.add_state();
    State q1 = m.add_state();
    m.set_initial(q0);
    m.add_entry(q0, a, Trans{q1, x, Dir::R});
    m.add_entry(q0, x, Trans{q1, x, Dir::R});
    m.add_entry(q1, a, Trans{q0, x, Dir::L});
    m.add_entry(q1, x, Trans{q0, x, Dir::L});
    m.finalize();
    auto r = run(m, {0, 0}, 1000);
    CHECK(r.outcome == Outcome::BudgetExhausted);
    CHECK(r.steps == 1000);
}

TEST_CASE("machines without a witness require an explicit budget") {
    OneTapeDtm m(basic_syms());
    m.add_state();
    m.set_initial(0);
    m.finalize();
    CHECK_THROWS_AS(run(m, {0}), std::invalid_argument);
}

TEST_CASE("frontier lasso: rightward runaway is detected after two repeats") {
    // On blank writes x and moves right forever in the same state.
    SymbolTable syms = basic_syms();
    uint32_t x = *syms.find("x");
    OneTapeDtm m(syms);
    State q0 = m.add_state();
    m.set_initial(q0);
    m.add_entry(q0, syms.blank(), Trans{q0, x, Dir::R});
    m.add_entry(q0, *syms.find("a"), Trans{q0, x, Dir::R});
    m.set_explicit_rank({2, 1, 0});  // blank, a, x
    m.finalize();
    auto r = run(m, {0});
    CHECK(r.outcome == Outcome::DivergedDetected);
    CHECK(r.steps < 10);

    // Leftward mirror.
    OneTapeDtm ml(basic_syms());
    State p = ml.add_state();
    ml.set_initial(p);
    ml.add_entry(p, ml.syms().blank(), Trans{p, x, Dir::L});
    ml.add_entry(p, 1, Trans{p, x, Dir::L});
    ml.set_explicit_rank({2, 1, 0});
    ml.finalize();
    auto rl = run(ml, {0});
    CHECK(rl.outcome == Outcome::DivergedDetected);
}

TEST_CASE("check_weight_reducing") {
    SUBCASE("explicit witness for a -> b") {
        SymbolTable syms;
        uint32_t a = syms.add_input("a");
        uint32_t b = syms.add_work("b");
        OneTapeDtm m(syms);
        State q = m.add_state();
        m.set_initial(q);
        m.add_entry(q, a, Trans{q, b, Dir::R});
        m.finalize();
        auto w = check_weight_reducing(m);
        REQUIRE(w.kind == WrWitness::Kind::ExplicitRank);
        CHECK(w.base_rank[a] == 1);
        CHECK(w.base_rank[b] == 0);
        CHECK_FALSE(rewrite_graph_has_cycle(m));
    }
    SUBCASE("self-rewrite yields a violation cycle") {
        SymbolTable syms = basic_syms();
        OneTapeDtm m(syms);
        State q = m.add_state();
        m.set_initial(q);
        m.add_entry(q, 1, Trans{q, 1, Dir::R});
        m.finalize();
        auto w = check_weight_reducing(m);
        REQUIRE(w.kind == WrWitness::Kind::Violation);
        REQUIRE(w.cycle.size() >= 2);
        CHECK(w.cycle.front() == w.cycle.back());
        CHECK(rewrite_graph_has_cycle(m));
    }
    SUBCASE("endmarker self-rewrites are exempt when end-marked") {
        SymbolTable syms;
        uint32_t a = syms.add_input("a");
        uint32_t x = syms.add_work("x");
        syms.add_endmarkers();
        OneTapeDtm m(syms);
        State q = m.add_state();
        m.set_initial(q);
        m.set_end_marked(true);
        m.add_entry(q, syms.lend(), Trans{q, syms.lend(), Dir::R});
        m.add_entry(q, a, Trans{q, x, Dir::R});
        m.add_entry(q, syms.rend(), Trans{q, syms.rend(), Dir::L});
        m.finalize();
        CHECK(check_weight_reducing(m).kind == WrWitness::Kind::ExplicitRank);
        CHECK_FALSE(rewrite_graph_has_cycle(m));
        CHECK(check_end_marked(m));
    }
    SUBCASE("witness exists iff the rewrite graph is acyclic, random machines") {
        std::mt19937_64 rng(5);
        for (int rep = 0; rep < 300; ++rep) {
            SymbolTable syms;
            syms.add_input("a");
            uint32_t nw = 2 + rng() % 3;
            for (uint32_t i = 0; i < nw; ++i) syms.add_work("w" + std::to_string(i));
            OneTapeDtm m(syms);
            uint32_t ns = 1 + rng() % 3;
            for (uint32_t i = 0; i < ns; ++i) m.add_state();
            m.set_initial(0);
            uint32_t nt = rng() % 8;
            for (uint32_t i = 0; i < nt; ++i) {
                State s = rng() % ns;
                uint32_t rb = rng() % syms.size();
                uint32_t wb = 1 + rng() % (syms.size() - 1);
                m.add_entry(s, rb, Trans{static_cast<State>(rng() % ns), wb,
                                         (rng() & 1) ? Dir::L : Dir::R});
            }
            try {
                m.finalize();
            } catch (const std::runtime_error&) {
                continue;  // nondeterministic draw
            }
            auto w = check_weight_reducing(m);
            CHECK(w.ok() == !rewrite_graph_has_cycle(m));
            if (w.kind == WrWitness::Kind::ExplicitRank) {
                // Every rewrite strictly decreases the returned rank.
                m.for_each_entry([&](State, uint32_t base, const Trans& t) {
                    if (base != t.write) CHECK(w.base_rank[t.write] < w.base_rank[base]);
                });
            }
        }
    }
}

TEST_CASE("end-marked machines stay within the marked segment") {
    SymbolTable syms;
    uint32_t a = syms.add_input("a");
    uint32_t x = syms.add_work("x");
    syms.add_endmarkers();
    OneTapeDtm m(syms);
    State q0 = m.add_state();
    State q1 = m.add_state();
    m.set_initial(q0);
    m.set_final(q1);
    m.set_end_marked(true);
    m.add_entry(q0, syms.lend(), Trans{q0, syms.lend(), Dir::R});
    m.add_entry(q0, a, Trans{q0, x, Dir::R});
    m.add_entry(q0, syms.rend(), Trans{q1, syms.rend(), Dir::L});
    m.finalize();
    auto r = run(m, {0, 0}, 100);
    CHECK(r.outcome == Outcome::Accepted);
    CHECK(r.left_extra == 0);
    CHECK(r.right_extra == 0);
    CHECK(r.visits_at(0) == 1);
    CHECK(r.visits_at(3) == 1);
    CHECK(check_end_marked(m));
}

TEST_CASE("check_end_marked catches violations") {
    SymbolTable syms;
    syms.add_input("a");
    syms.add_endmarkers();
    OneTapeDtm m(syms);
    State q = m.add_state();
    m.set_initial(q);
    m.set_end_marked(true);
    m.add_entry(q, syms.rend(), Trans{q, syms.rend(), Dir::L});
    m.add_entry(q, syms.lend(), Trans{q, syms.lend(), Dir::L});  // must move R
    m.finalize();
    std::string why;
    CHECK_FALSE(check_end_marked(m, &why));
    CHECK(!why.empty());
}

TEST_CASE("graded machines: countdown semantics and witness") {
    // One state bouncing on a single cell: raw version never terminates,
    // the graded version halts once the countdown hits zero.
    SymbolTable syms = basic_syms();
    uint32_t a = *syms.find("a");
    uint32_t x = *syms.find("x");
    OneTapeDtm m(syms);
    State q0 = m.add_state();
    State q1 = m.add_state();
    m.set_initial(q0);
    m.add_entry(q0, a, Trans{q1, x, Dir::R});
    m.add_entry(q0, x, Trans{q1, x, Dir::R});
    m.add_entry(q1, a, Trans{q0, x, Dir::L});
    m.add_entry(q1, x, Trans{q0, x, Dir::L});
    m.set_grading(5);
    m.finalize();
    auto w = check_weight_reducing(m);
    CHECK(w.kind == WrWitness::Kind::GradedRank);
    CHECK(w.k == 5);
    auto r = run(m, {0, 0});
    CHECK(r.outcome == Outcome::RejectedHalt);
    CHECK(r.max_visits() <= 5);
    CHECK(m.max_rank() == 5);
}

TEST_CASE("size_report uses the virtual alphabet") {
    SymbolTable syms;
    syms.add_input("a");  // |Gamma| = blank + a + x + y = 4
    uint32_t x = syms.add_work("x");
    uint32_t y = syms.add_work("y");
    OneTapeDtm m(syms);
    State q0 = m.add_state();
    State q1 = m.add_state();
    m.set_initial(q0);
    m.add_entry(q0, 1, Trans{q1, x, Dir::R});
    m.add_entry(q1, x, Trans{q0, y, Dir::L});
    m.finalize();
    auto rep = m.size_report();
    CHECK(rep.states == 2);
    CHECK(rep.work_symbols == 4);
    // |Q| = 2, |Gamma| = 4 -> metric 2*4*ceil(log2 8) = 24.
    CHECK(rep.size_metric == 24);
    CHECK(nfa_size_metric(5, 2) == 50);

    // Grading with k: pristine bases plus k copies of each written base.
    auto g = m;
    g.set_grading(10);
    g.finalize();
    CHECK(g.virtual_symbol_count() == 4 + 10 * 2);
    CHECK(g.default_budget(0) > 0);
}

TEST_CASE("nondeterministic tables are rejected at finalize") {
    OneTapeDtm m(basic_syms());
    State q = m.add_state();
    m.set_initial(q);
    m.add_entry(q, 1, Trans{q, 2, Dir::R});
    m.add_entry(q, 1, Trans{q, 2, Dir::L});
    CHECK_THROWS_AS(m.finalize(), std::runtime_error);
}

TEST_CASE("default transitions rewrite the read symbol") {
    SymbolTable syms = basic_syms();
    OneTapeDtm m(syms);
    State q0 = m.add_state();
    State q1 = m.add_state();
    m.set_initial(q0);
    m.set_final(q1);
    m.add_default(q0, Dir::R, q1);
    m.finalize();
    auto r = run(m, {0}, 10);
    CHECK(r.outcome == Outcome::Accepted);
    CHECK(r.steps == 1);
    // Defaults never fire on blank.
    auto r2 = run(m, {}, 10);
    CHECK(r2.outcome == Outcome::RejectedHalt);
    // Identity rewrites make the machine non-weight-reducing.
    CHECK(check_weight_reducing(m).kind == WrWitness::Kind::Violation);
}
