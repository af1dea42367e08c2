#pragma once

// Equivalence testing, profiling, seeded automaton generators, and the
// witness language families used across the test suites.

#include <cstdint>
#include <functional>
#include <optional>
#include <variant>
#include <string>
#include <vector>

#include "nfa2tm/automata.hpp"
#include "nfa2tm/tape_machine.hpp"

namespace nfa2tm {

// Deterministic RNG helpers: identical seeds give identical draws on every
// platform (std::uniform_int_distribution is not portable).
class DetRng {
public:
    explicit DetRng(uint64_t seed) : s_(seed) {}
    uint64_t next();
    uint32_t below(uint32_t bound);       // uniform in [0, bound)
    bool chance(double p);                // true with probability p
private:
    uint64_t s_;
};

struct GeneratorSpec {
    uint32_t n = 2;
    uint32_t alphabet_size = 2;
    double density = 0.3;  // expected fraction of present transition candidates
    uint64_t seed = 0;
    bool unary = false;
};

TwoWayNfa random_2nfa(const GeneratorSpec& spec);
TwoWayNfa random_unary_2nfa(GeneratorSpec spec);
OneWayNfa random_1nfa(const GeneratorSpec& spec);

// Witness families with closed-form membership predicates serving as an
// independent second oracle.
struct WitnessFamily {
    std::string name;
    std::variant<OneWayNfa, TwoWayNfa> automaton;
    std::function<bool(const Word&)> predicate;
};

// The named corpus: determinization witnesses (k-th symbol from the end),
// unary residue two-way automata, and sweepers that turn on both endmarkers.
std::vector<WitnessFamily> witness_families();

// (k+1)-state 1NFA for "the k-th symbol from the end is 'a'".
OneWayNfa kth_from_end_nfa(uint32_t k);
bool kth_from_end_pred(const Word& w, uint32_t k);

// Unary 2NFA accepting a^i iff i = r (mod p).
TwoWayNfa unary_mod_2nfa(uint32_t p, uint32_t r);

// Two-way sweeper accepting words whose first and last symbols are both 'a'.
TwoWayNfa ping_pong_2nfa();
bool ping_pong_pred(const Word& w);

// Parity of 'a's, lifted to a 2NFA.
TwoWayNfa even_a_2nfa();
bool even_a_pred(const Word& w);

// Lift a one-way NFA to the two-way model (scan right, accept by exiting).
TwoWayNfa lift_to_2nfa(const OneWayNfa& a);

struct Mismatch {
    Word word;
    bool oracle_accepts = false;
    bool machine_accepts = false;
    bool in_guarantee = false;
};

struct EquivReport {
    uint32_t min_len = 0;
    uint32_t max_len = 0;
    bool exhaustive = false;
    uint64_t words_tested = 0;
    std::vector<Mismatch> mismatches;      // all disagreements, flagged by domain
    uint64_t inconclusive = 0;             // budget-exhausted runs
    uint64_t max_steps = 0;
    uint64_t max_visits = 0;
    uint64_t max_left_extra = 0;
    uint64_t max_right_extra = 0;

    bool in_guarantee_clean() const {
        if (inconclusive) return false;
        for (const auto& m : mismatches)
            if (m.in_guarantee) return false;
        return true;
    }
};

struct EquivOptions {
    uint32_t min_len = 0;
    uint32_t max_len = 8;
    // Exhaustive up to this many words per length sweep; beyond it random
    // sampling is forced.
    uint64_t exhaustive_ceiling = 1u << 18;
    uint64_t random_count = 0;     // if nonzero: sample this many random words
    uint32_t max_random_len = 0;   // of length min_len..max_random_len
    uint64_t seed = 0;
    std::optional<uint64_t> budget;
    uint64_t guarantee_min_len = 0;  // mismatches below this are out-of-guarantee
    uint32_t threads = 0;            // 0 = hardware concurrency
};

using Oracle = std::function<bool(const Word&)>;

EquivReport equiv_check(const Oracle& oracle, const Alphabet& alphabet, const OneTapeDtm& m,
                        const EquivOptions& opt);

struct ScalingRow {
    uint32_t len = 0;
    uint64_t max_steps = 0;
    uint64_t max_visits = 0;
    uint64_t max_left_extra = 0;
    uint64_t max_right_extra = 0;
};

// Deterministic per-length profiling: `samples` seeded random words per
// length plus the all-first-symbol word.
std::vector<ScalingRow> profile_scaling(const OneTapeDtm& m, const Alphabet& alphabet,
                                        const std::vector<uint32_t>& lengths, uint32_t samples,
                                        uint64_t seed, std::optional<uint64_t> budget);

// Least-squares fit of y = c * x^d over (x, y) pairs in log-log space.
struct PowerFit {
    double c = 0;
    double d = 0;
};
PowerFit fit_power_law(const std::vector<std::pair<double, double>>& points);

}  // namespace nfa2tm
