// nfa2tm: convert one-way and two-way NFAs into restricted one-tape
// deterministic Turing machines, run and check the results.

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "nfa2tm/constructions.hpp"
#include "nfa2tm/machine_builder.hpp"
#include "nfa2tm/formats.hpp"
#include "nfa2tm/harness.hpp"
#include "nfa2tm/report.hpp"

using namespace nfa2tm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPropertyFailed = 1;
constexpr int kExitUsage = 2;

double budget_multiplier() {
    if (const char* env = std::getenv("NFA2TM_BUDGET_MULT")) {
        double v = std::atof(env);
        if (v > 0) return v;
    }
    return 1.0;
}

std::optional<uint64_t> effective_budget(const OneTapeDtm& m, size_t len,
                                         std::optional<uint64_t> explicit_budget) {
    if (explicit_budget) return *explicit_budget;
    if (m.has_wr_witness())
        return static_cast<uint64_t>(budget_multiplier() *
                                     static_cast<double>(m.default_budget(len)));
    // Raw machines need some cap; a generous default scaled by the table.
    return static_cast<uint64_t>(budget_multiplier() * 4e9);
}

Word parse_input_word(const Alphabet& al, const std::string& s) {
    if (s == "-") return {};
    return al.word_from_string(s);
}

Alphabet machine_alphabet(const OneTapeDtm& m) {
    std::vector<std::string> names;
    for (uint32_t b : m.syms().input_bases()) names.push_back(m.syms().name(b));
    return Alphabet(names);
}

int cmd_convert(const std::string& in, const std::string& construction, const std::string& out,
                bool skip_wr, std::optional<uint64_t> k, std::optional<uint64_t> fold_c) {
    if (construction == "lemma-wr" || construction == "lemma-fold") {
        OneTapeDtm m = parse_machine(read_file(in));
        OneTapeDtm result = m;
        if (construction == "lemma-wr") {
            if (!k) {
                std::cerr << "lemma-wr needs --k\n";
                return kExitUsage;
            }
            result = wr_from_visit_bounded(m, *k);
        } else {
            if (!fold_c) {
                std::cerr << "lemma-fold needs --fold-c\n";
                return kExitUsage;
            }
            result = fold_to_hennie(m, *fold_c);
        }
        write_file(out, print_machine(result));
        auto rep = result.size_report();
        std::cout << "states " << rep.states << "\nwork_symbols " << rep.work_symbols
                  << "\nsize_metric " << rep.size_metric << "\n";
        return kExitOk;
    }

    AutomatonValue a = parse_automaton(read_file(in));
    ConstructionResult res = [&]() {
        if (construction_takes_2nfa(construction)) {
            if (!std::holds_alternative<TwoWayNfa>(a))
                throw std::invalid_argument("construction " + construction +
                                            " expects a two-way automaton");
            return build_named_2nfa(construction, std::get<TwoWayNfa>(a), skip_wr);
        }
        if (!std::holds_alternative<OneWayNfa>(a))
            throw std::invalid_argument("construction " + construction +
                                        " expects a one-way automaton");
        return build_named_1nfa(construction, std::get<OneWayNfa>(a), skip_wr);
    }();
    write_file(out, print_machine(res.machine));
    auto rep = res.machine.size_report();
    std::cout << "states " << rep.states << "\nwork_symbols " << rep.work_symbols
              << "\nbase_transitions " << rep.base_transitions << "\nsize_metric "
              << rep.size_metric << "\nguarantee_min_len " << res.guarantee_min_len << "\n";
    return kExitOk;
}

int cmd_run(const std::string& machine_path, const std::string& input,
            std::optional<uint64_t> budget, const std::string& profile_out) {
    OneTapeDtm m = parse_machine(read_file(machine_path));
    Word w = parse_input_word(machine_alphabet(m), input);
    RunResult r = run(m, w, effective_budget(m, w.size(), budget));
    std::cout << "outcome " << outcome_name(r.outcome) << "\nsteps " << r.steps
              << "\nleft_extra " << r.left_extra << "\nright_extra " << r.right_extra << "\n";
    if (!profile_out.empty()) write_file(profile_out, visit_profile_csv(r));
    return kExitOk;
}

int cmd_check(const std::string& machine_path, const std::string& property,
              const std::vector<std::string>& inputs, std::optional<uint64_t> budget) {
    OneTapeDtm m = parse_machine(read_file(machine_path));
    if (property == "wr") {
        WrWitness w = check_weight_reducing(m);
        if (w.ok()) {
            if (w.kind == WrWitness::Kind::GradedRank)
                std::cout << "weight-reducing: countdown witness k=" << w.k << "\n";
            else
                std::cout << "weight-reducing: explicit rank witness\n";
            return kExitOk;
        }
        std::cout << "violation cycle:";
        for (uint32_t b : w.cycle) std::cout << " " << m.syms().name(b);
        std::cout << "\n";
        return kExitPropertyFailed;
    }
    if (property == "endmarked") {
        std::string why;
        if (check_end_marked(m, &why)) {
            std::cout << "end-marked\n";
            return kExitOk;
        }
        std::cout << "not end-marked: " << why << "\n";
        return kExitPropertyFailed;
    }
    if (property == "halting-on") {
        Alphabet al = machine_alphabet(m);
        for (const auto& s : inputs) {
            Word w = parse_input_word(al, s);
            RunResult r = run(m, w, effective_budget(m, w.size(), budget));
            if (r.outcome == Outcome::DivergedDetected || r.outcome == Outcome::BudgetExhausted) {
                std::cout << "non-halting on '" << s << "': " << outcome_name(r.outcome) << "\n";
                return kExitPropertyFailed;
            }
        }
        std::cout << "halts on all " << inputs.size() << " inputs\n";
        return kExitOk;
    }
    std::cerr << "unknown property " << property << "\n";
    return kExitUsage;
}

int cmd_equiv(const std::string& automaton_path, const std::string& machine_path,
              uint32_t min_len, uint32_t max_len, uint64_t random_count,
              uint32_t max_random_len, uint64_t seed, uint64_t guarantee,
              std::optional<uint64_t> budget) {
    AutomatonValue a = parse_automaton(read_file(automaton_path));
    OneTapeDtm m = parse_machine(read_file(machine_path));
    EquivOptions opt;
    opt.min_len = min_len;
    opt.max_len = max_len;
    opt.random_count = random_count;
    opt.max_random_len = max_random_len;
    opt.seed = seed;
    opt.guarantee_min_len = guarantee;
    const Alphabet& al = std::holds_alternative<TwoWayNfa>(a)
                             ? std::get<TwoWayNfa>(a).alphabet()
                             : std::get<OneWayNfa>(a).alphabet();
    opt.budget = effective_budget(m, std::max(max_len, max_random_len), budget);
    Oracle oracle;
    if (std::holds_alternative<TwoWayNfa>(a)) {
        const TwoWayNfa& t = std::get<TwoWayNfa>(a);
        oracle = [&t](const Word& w) { return accepts_2nfa(t, w); };
    } else {
        const OneWayNfa& o = std::get<OneWayNfa>(a);
        oracle = [&o](const Word& w) { return accepts_1nfa(o, w); };
    }
    EquivReport rep = equiv_check(oracle, al, m, opt);
    std::cout << "words " << rep.words_tested << "\nexhaustive " << (rep.exhaustive ? "yes" : "no")
              << "\nmismatches " << rep.mismatches.size() << "\ninconclusive "
              << rep.inconclusive << "\n";
    for (const auto& mm : rep.mismatches) {
        std::cout << (mm.in_guarantee ? "mismatch " : "out-of-guarantee ") << "'"
                  << al.word_to_string(mm.word) << "' oracle=" << mm.oracle_accepts
                  << " machine=" << mm.machine_accepts << "\n";
    }
    return rep.in_guarantee_clean() ? kExitOk : kExitPropertyFailed;
}

int cmd_report(const std::string& suite, const std::string& out_dir, uint64_t seed) {
    if (suite != "standard") {
        std::cerr << "unknown suite '" << suite << "'\n";
        return kExitUsage;
    }
    std::filesystem::create_directories(out_dir);
    for (const auto& f : standard_report(seed)) {
        write_file(out_dir + "/" + f.name, f.content);
        std::cout << f.name << " " << f.content.size() << " bytes\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"NFA to restricted deterministic Turing machine toolkit"};
    app.require_subcommand(1);

    std::string in, out, construction, machine_path, automaton_path, input, profile_out, property,
        suite = "standard", out_dir;
    bool skip_wr = false;
    std::optional<uint64_t> budget, lemma_k, fold_c;
    uint32_t min_len = 0, max_len = 8, max_random_len = 0;
    uint64_t random_count = 0, seed = 0, guarantee = 0;
    std::vector<std::string> inputs;

    auto* conv = app.add_subcommand("convert", "build a machine from an automaton");
    conv->add_option("--in", in)->required();
    conv->add_option("--construction", construction)->required();
    conv->add_option("--out", out)->required();
    conv->add_flag("--skip-wr-pass", skip_wr);
    bool debug_ir = false;
    conv->add_flag("--debug-ir", debug_ir,
                   "annotate compiled states with their IR source in file comments");
    conv->add_option("--k", lemma_k);
    conv->add_option("--fold-c", fold_c);

    auto* runc = app.add_subcommand("run", "simulate a machine on an input");
    runc->add_option("--machine", machine_path)->required();
    runc->add_option("--input", input)->required();
    runc->add_option("--budget", budget);
    runc->add_option("--profile", profile_out);

    auto* checkc = app.add_subcommand("check", "static and dynamic property checks");
    checkc->add_option("--machine", machine_path)->required();
    checkc->add_option("--property", property)->required();
    checkc->add_option("--inputs", inputs);
    checkc->add_option("--budget", budget);

    auto* equivc = app.add_subcommand("equiv", "compare a machine against its automaton");
    equivc->add_option("--automaton", automaton_path)->required();
    equivc->add_option("--machine", machine_path)->required();
    equivc->add_option("--min-len", min_len);
    equivc->add_option("--max-len", max_len);
    equivc->add_option("--random", random_count);
    equivc->add_option("--max-random-len", max_random_len);
    equivc->add_option("--seed", seed);
    equivc->add_option("--guarantee", guarantee);
    equivc->add_option("--budget", budget);

    auto* reportc = app.add_subcommand("report", "run the standard suite and emit CSVs");
    reportc->add_option("--suite", suite);
    reportc->add_option("--out", out_dir)->required();
    reportc->add_option("--seed", seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (conv->parsed()) {
            set_compile_source_maps(debug_ir);
            return cmd_convert(in, construction, out, skip_wr, lemma_k, fold_c);
        }
        if (runc->parsed()) return cmd_run(machine_path, input, budget, profile_out);
        if (checkc->parsed()) return cmd_check(machine_path, property, inputs, budget);
        if (equivc->parsed())
            return cmd_equiv(automaton_path, machine_path, min_len, max_len, random_count,
                             max_random_len, seed, guarantee, budget);
        if (reportc->parsed()) return cmd_report(suite, out_dir, seed);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
