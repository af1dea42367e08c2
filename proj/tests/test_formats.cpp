#include "doctest.h"

#include "fixtures.hpp"
#include "nfa2tm/constructions.hpp"
#include "nfa2tm/formats.hpp"
#include "nfa2tm/harness.hpp"

using namespace nfa2tm;

namespace {

bool same_2nfa(const TwoWayNfa& a, const TwoWayNfa& b) {
    if (a.num_states() != b.num_states() || !(a.alphabet() == b.alphabet())) return false;
    if (a.initial() != b.initial() || a.final_mask() != b.final_mask()) return false;
    for (State q = 0; q < a.num_states(); ++q)
        for (Symbol s = 0; s < a.num_ext_syms(); ++s) {
            auto ma = a.moves(q, s), mb = b.moves(q, s);
            std::sort(ma.begin(), ma.end());
            std::sort(mb.begin(), mb.end());
            if (ma != mb) return false;
        }
    return true;
}

bool same_machine(const OneTapeDtm& a, const OneTapeDtm& b) {
    if (a.num_states() != b.num_states() || a.initial() != b.initial()) return false;
    if (a.end_marked() != b.end_marked() || a.pair_mode() != b.pair_mode()) return false;
    if (a.grading().has_value() != b.grading().has_value()) return false;
    if (a.grading() && a.grading()->k != b.grading()->k) return false;
    if (a.num_entries() != b.num_entries()) return false;
    bool ok = true;
    a.for_each_entry([&](State s, uint32_t base, const Trans& t) {
        const Trans* u = b.lookup(s, base);
        if (!u || u->next != t.next || u->write != t.write || u->dir != t.dir) ok = false;
    });
    for (State s = 0; s < a.num_states(); ++s) {
        if (a.view(s) != b.view(s) || a.is_final(s) != b.is_final(s)) ok = false;
        if (a.has_default(s) != b.has_default(s)) ok = false;
    }
    return ok;
}

}  // namespace

TEST_CASE("automaton files round-trip on canonical form") {
    auto a = fixtures::three_state();
    std::string text = print_automaton(a);
    auto parsed = parse_automaton(text);
    REQUIRE(std::holds_alternative<TwoWayNfa>(parsed));
    CHECK(same_2nfa(std::get<TwoWayNfa>(parsed), a));
    CHECK(print_automaton(std::get<TwoWayNfa>(parsed)) == text);

    auto b = kth_from_end_nfa(3);
    std::string tb = print_automaton(b);
    auto pb = parse_automaton(tb);
    REQUIRE(std::holds_alternative<OneWayNfa>(pb));
    CHECK(print_automaton(std::get<OneWayNfa>(pb)) == tb);

    for (uint32_t seed = 0; seed < 20; ++seed) {
        auto r = random_2nfa(GeneratorSpec{3, 2, 0.3, seed});
        auto rp = parse_automaton(print_automaton(r));
        CHECK(same_2nfa(std::get<TwoWayNfa>(rp), r));
    }
}

TEST_CASE("automaton parser reports line numbers for unknown directives") {
    std::string bad = "kind: 2nfa\nstates: s0\nwibble: 3\n";
    try {
        parse_automaton(bad);
        FAIL("expected parse error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    // Endmarker discipline violations surface with their line too.
    std::string badt =
        "kind: 2nfa\nstates: s0\nalphabet: a\ninitial: s0\nfinal:\ntrans: s0 < -> s0 L\n";
    try {
        parse_automaton(badt);
        FAIL("expected parse error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("line 6") != std::string::npos);
    }
}

TEST_CASE("machine files round-trip, including witnesses and pairs") {
    SUBCASE("hand machine with explicit ranks") {
        SymbolTable sy;
        sy.add_input("a");
        sy.add_work("x");
        OneTapeDtm m(sy);
        State q0 = m.add_state();
        State q1 = m.add_state(View::Slot2);
        m.set_initial(q0);
        m.set_final(q1);
        m.add_entry(q0, 1, Trans{q1, 2, Dir::R});
        m.add_default(q1, Dir::L, q0);
        m.set_explicit_rank({2, 1, 0});
        m.finalize();
        auto text = print_machine(m);
        auto p = parse_machine(text);
        CHECK(same_machine(p, m));
        CHECK(print_machine(p) == text);
        CHECK(p.explicit_rank().has_value());
    }
    SUBCASE("graded folded construction output") {
        auto a = even_a_2nfa();
        auto c = build_2nfa_to_wrdhm_long(a);
        auto text = print_machine(c.machine);
        auto p = parse_machine(text);
        CHECK(same_machine(p, c.machine));
        CHECK(print_machine(p) == text);
        // The reloaded machine runs identically.
        for (const auto& w : all_words_up_to(a.alphabet(), 6)) {
            auto r1 = run(c.machine, w);
            auto r2 = run(p, w);
            CHECK(r1.outcome == r2.outcome);
            CHECK(r1.steps == r2.steps);
        }
    }
}

TEST_CASE("csv writers") {
    CsvWriter csv({"a", "b"});
    csv.row({"1", "2"});
    CHECK(csv.text() == "a,b\n1,2\n");
    CHECK_THROWS_AS(csv.row({"1"}), std::invalid_argument);

    SymbolTable sy;
    sy.add_input("a");
    sy.add_work("x");
    OneTapeDtm m(sy);
    State q = m.add_state();
    m.set_initial(q);
    m.set_final(q);
    m.add_entry(q, 1, Trans{q, 2, Dir::R});
    m.finalize();
    auto r = run(m, {0, 0}, 100);
    auto text = visit_profile_csv(r);
    CHECK(text == "cell_index,visits\n0,1\n1,1\n");
}
