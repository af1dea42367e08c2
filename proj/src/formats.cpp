#include "nfa2tm/formats.hpp"

#include <fstream>
#include <sstream>

namespace nfa2tm {

namespace {

std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) {
        if (tok[0] == '#') break;
        out.push_back(tok);
    }
    return out;
}

struct Directive {
    size_t line_no;
    std::string key;
    std::vector<std::string> args;
};

std::vector<Directive> parse_lines(const std::string& text) {
    std::vector<Directive> out;
    std::istringstream ss(text);
    std::string line;
    size_t no = 0;
    while (std::getline(ss, line)) {
        ++no;
        auto toks = tokenize(line);
        if (toks.empty()) continue;
        if (toks[0].back() != ':')
            throw std::runtime_error("line " + std::to_string(no) + ": expected a directive");
        Directive d;
        d.line_no = no;
        d.key = toks[0].substr(0, toks[0].size() - 1);
        d.args.assign(toks.begin() + 1, toks.end());
        out.push_back(std::move(d));
    }
    return out;
}

[[noreturn]] void fail(const Directive& d, const std::string& msg) {
    throw std::runtime_error("line " + std::to_string(d.line_no) + ": " + msg);
}

uint32_t parse_u32(const Directive& d, const std::string& s) {
    try {
        size_t pos = 0;
        unsigned long v = std::stoul(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return static_cast<uint32_t>(v);
    } catch (...) {
        fail(d, "expected a number, got '" + s + "'");
    }
}

}  // namespace

std::string print_automaton(const OneWayNfa& a) {
    std::ostringstream out;
    out << "kind: 1nfa\n";
    out << "states:";
    for (uint32_t i = 0; i < a.num_states(); ++i) out << " s" << i;
    out << "\nalphabet:";
    for (const auto& n : a.alphabet().names()) out << " " << n;
    out << "\ninitial: s" << a.initial() << "\nfinal:";
    for (State f : a.finals()) out << " s" << f;
    out << "\n";
    for (State q = 0; q < a.num_states(); ++q)
        for (Symbol s = 0; s < a.alphabet().size(); ++s) {
            uint32_t ts = a.targets(q, s);
            for (State t = 0; t < a.num_states(); ++t)
                if ((ts >> t) & 1u)
                    out << "trans: s" << q << " " << a.alphabet().name(s) << " -> s" << t << "\n";
        }
    return out.str();
}

std::string print_automaton(const TwoWayNfa& a) {
    std::ostringstream out;
    out << "kind: 2nfa\n";
    out << "states:";
    for (uint32_t i = 0; i < a.num_states(); ++i) out << " s" << i;
    out << "\nalphabet:";
    for (const auto& n : a.alphabet().names()) out << " " << n;
    out << "\ninitial: s" << a.initial() << "\nfinal:";
    for (State f : a.finals()) out << " s" << f;
    out << "\n";
    auto sym_name = [&](Symbol s) -> std::string {
        if (s == a.lend()) return "<";
        if (s == a.rend()) return ">";
        return a.alphabet().name(s);
    };
    for (State q = 0; q < a.num_states(); ++q)
        for (Symbol s = 0; s < a.num_ext_syms(); ++s)
            for (auto [t, d] : a.moves(q, s))
                out << "trans: s" << q << " " << sym_name(s) << " -> s" << t << " "
                    << (d == Dir::L ? "L" : "R") << "\n";
    return out.str();
}

AutomatonValue parse_automaton(const std::string& text) {
    auto dirs = parse_lines(text);
    std::string kind;
    std::vector<std::string> states, alphabet, finals;
    std::string initial;
    std::vector<Directive> trans;
    for (const auto& d : dirs) {
        if (d.key == "kind") {
            if (d.args.size() != 1 || (d.args[0] != "1nfa" && d.args[0] != "2nfa"))
                fail(d, "kind must be 1nfa or 2nfa");
            kind = d.args[0];
        } else if (d.key == "states") {
            states = d.args;
        } else if (d.key == "alphabet") {
            alphabet = d.args;
        } else if (d.key == "initial") {
            if (d.args.size() != 1) fail(d, "initial takes one state");
            initial = d.args[0];
        } else if (d.key == "final") {
            finals = d.args;
        } else if (d.key == "trans") {
            trans.push_back(d);
        } else {
            fail(d, "unknown directive '" + d.key + "'");
        }
    }
    if (kind.empty()) throw std::runtime_error("missing kind directive");
    if (states.empty()) throw std::runtime_error("missing states directive");
    auto state_id = [&](const Directive& d, const std::string& name) -> State {
        for (size_t i = 0; i < states.size(); ++i)
            if (states[i] == name) return static_cast<State>(i);
        fail(d, "unknown state '" + name + "'");
    };
    Alphabet al(alphabet);
    std::vector<State> fin;
    for (const auto& f : finals) {
        for (size_t i = 0; i < states.size(); ++i)
            if (states[i] == f) fin.push_back(static_cast<State>(i));
    }
    State q0 = 0;
    {
        bool found = false;
        for (size_t i = 0; i < states.size(); ++i)
            if (states[i] == initial) {
                q0 = static_cast<State>(i);
                found = true;
            }
        if (!found) throw std::runtime_error("initial state not in states");
    }
    if (kind == "1nfa") {
        OneWayNfa a(static_cast<uint32_t>(states.size()), al, q0, fin);
        for (const auto& d : trans) {
            if (d.args.size() != 4 || d.args[2] != "->")
                fail(d, "expected: trans: s x -> t");
            auto sym = al.find(d.args[1]);
            if (!sym) fail(d, "unknown symbol '" + d.args[1] + "'");
            a.add_transition(state_id(d, d.args[0]), *sym, state_id(d, d.args[3]));
        }
        return a;
    }
    TwoWayNfa a(static_cast<uint32_t>(states.size()), al, q0, fin);
    for (const auto& d : trans) {
        if (d.args.size() != 5 || d.args[2] != "->")
            fail(d, "expected: trans: s x -> t D");
        Symbol sym;
        if (d.args[1] == "<")
            sym = a.lend();
        else if (d.args[1] == ">")
            sym = a.rend();
        else {
            auto s = al.find(d.args[1]);
            if (!s) fail(d, "unknown symbol '" + d.args[1] + "'");
            sym = *s;
        }
        Dir dd;
        if (d.args[4] == "L")
            dd = Dir::L;
        else if (d.args[4] == "R")
            dd = Dir::R;
        else
            fail(d, "direction must be L or R");
        try {
            a.add_transition(state_id(d, d.args[0]), sym, state_id(d, d.args[3]), dd);
        } catch (const std::invalid_argument& e) {
            fail(d, e.what());
        }
    }
    return a;
}

std::string print_machine(const OneTapeDtm& m) {
    std::ostringstream out;
    const SymbolTable& sy = m.syms();
    out << "kind: dtm\n";
    if (m.end_marked() || m.pair_mode()) {
        out << "flags:";
        if (m.end_marked()) out << " endmarked";
        if (m.pair_mode()) out << " pairs";
        out << "\n";
    }
    out << "states: " << m.num_states() << "\n";
    out << "blank: " << sy.name(sy.blank()) << "\n";
    // Work symbols one per line in id order, so transition lines can refer
    // to them and reloading reproduces the exact table layout.
    for (uint32_t b = 1; b < sy.size(); ++b) {
        const char* kind = "work";
        switch (sy.kind(b)) {
            case BaseKind::Input: kind = "input"; break;
            case BaseKind::LEnd: kind = "lend"; break;
            case BaseKind::REnd: kind = "rend"; break;
            default: break;
        }
        out << "sym: " << sy.name(b) << " " << kind << "\n";
    }
    if (m.grading()) out << "grade: " << m.grading()->k << "\n";
    if (m.explicit_rank()) {
        out << "rank:";
        for (uint32_t b = 0; b < sy.size(); ++b)
            out << " " << sy.name(b) << "=" << (*m.explicit_rank())[b];
        out << "\n";
    }
    for (State s = 0; s < m.num_states(); ++s)
        if (!m.state_name(s).empty()) out << "# state " << s << " " << m.state_name(s) << "\n";
    out << "initial: " << m.initial() << "\nfinal:";
    for (State s = 0; s < m.num_states(); ++s)
        if (m.is_final(s)) out << " " << s;
    out << "\n";
    for (State s = 0; s < m.num_states(); ++s)
        if (m.view(s) != View::Whole)
            out << "view: " << s << " " << (m.view(s) == View::Slot1 ? "slot1" : "slot2") << "\n";
    m.for_each_entry([&](State s, uint32_t base, const Trans& t) {
        out << "trans: " << s << " " << sy.name(base) << " -> " << t.next << " "
            << sy.name(t.write) << " " << (t.dir == Dir::L ? "L" : "R") << "\n";
    });
    m.for_each_default([&](State s, Dir d, State next) {
        out << "default: " << s << " " << (d == Dir::L ? "L" : "R") << " " << next << "\n";
    });
    return out.str();
}

OneTapeDtm parse_machine(const std::string& text) {
    auto dirs = parse_lines(text);
    SymbolTable sy;
    bool saw_kind = false, endmarked = false, pairs = false;
    uint32_t nstates = 0;
    std::optional<uint64_t> grade;
    std::vector<std::pair<std::string, uint64_t>> ranks;
    std::optional<uint32_t> initial;
    std::vector<uint32_t> finals;
    std::vector<std::pair<uint32_t, View>> views;
    struct TransLine {
        Directive d;
    };
    std::vector<Directive> trans, defaults;

    for (const auto& d : dirs) {
        if (d.key == "kind") {
            if (d.args.size() != 1 || d.args[0] != "dtm") fail(d, "kind must be dtm");
            saw_kind = true;
        } else if (d.key == "flags") {
            for (const auto& f : d.args) {
                if (f == "endmarked")
                    endmarked = true;
                else if (f == "pairs")
                    pairs = true;
                else
                    fail(d, "unknown flag '" + f + "'");
            }
        } else if (d.key == "states") {
            if (d.args.size() != 1) fail(d, "states takes a count");
            nstates = parse_u32(d, d.args[0]);
        } else if (d.key == "blank") {
            if (d.args.size() != 1 || d.args[0] != sy.name(sy.blank()))
                fail(d, "blank symbol must be spelled _");
        } else if (d.key == "sym") {
            if (d.args.size() != 2) fail(d, "sym: name kind");
            BaseKind k;
            if (d.args[1] == "input")
                k = BaseKind::Input;
            else if (d.args[1] == "work")
                k = BaseKind::Work;
            else if (d.args[1] == "lend")
                k = BaseKind::LEnd;
            else if (d.args[1] == "rend")
                k = BaseKind::REnd;
            else
                fail(d, "unknown symbol kind '" + d.args[1] + "'");
            sy.add(d.args[0], k);
        } else if (d.key == "grade") {
            if (d.args.size() != 1) fail(d, "grade takes a bound");
            grade = parse_u32(d, d.args[0]);
        } else if (d.key == "rank") {
            for (const auto& kv : d.args) {
                auto eq = kv.find('=');
                if (eq == std::string::npos) fail(d, "rank entries look like sym=int");
                ranks.emplace_back(kv.substr(0, eq), parse_u32(d, kv.substr(eq + 1)));
            }
        } else if (d.key == "initial") {
            if (d.args.size() != 1) fail(d, "initial takes one state");
            initial = parse_u32(d, d.args[0]);
        } else if (d.key == "final") {
            for (const auto& f : d.args) finals.push_back(parse_u32(d, f));
        } else if (d.key == "view") {
            if (d.args.size() != 2) fail(d, "view: state slot1|slot2");
            View v;
            if (d.args[1] == "slot1")
                v = View::Slot1;
            else if (d.args[1] == "slot2")
                v = View::Slot2;
            else
                fail(d, "view must be slot1 or slot2");
            views.emplace_back(parse_u32(d, d.args[0]), v);
        } else if (d.key == "trans") {
            trans.push_back(d);
        } else if (d.key == "default") {
            defaults.push_back(d);
        } else {
            fail(d, "unknown directive '" + d.key + "'");
        }
    }
    if (!saw_kind) throw std::runtime_error("missing kind directive");
    if (!initial) throw std::runtime_error("missing initial directive");

    OneTapeDtm m2(sy);
    {
        std::vector<View> vv(nstates, View::Whole);
        for (auto [s, v] : views) vv.at(s) = v;
        for (uint32_t s = 0; s < nstates; ++s) m2.add_state(vv[s]);
    }
    m2.set_initial(*initial);
    m2.set_end_marked(endmarked);
    m2.set_pair_mode(pairs);
    if (grade) m2.set_grading(*grade);
    for (uint32_t f : finals) m2.set_final(f);
    if (!ranks.empty()) {
        std::vector<uint64_t> r(sy.size(), 0);
        for (const auto& [name, val] : ranks) {
            auto b = sy.find(name);
            if (!b) throw std::runtime_error("rank names unknown symbol " + name);
            r[*b] = val;
        }
        m2.set_explicit_rank(std::move(r));
    }
    auto sym_id = [&](const Directive& d, const std::string& name) -> uint32_t {
        auto b = sy.find(name);
        if (!b) fail(d, "unknown symbol '" + name + "'");
        return *b;
    };
    for (const auto& d : trans) {
        if (d.args.size() != 6 || d.args[2] != "->")
            fail(d, "expected: trans: s x -> t y D");
        Dir dd = d.args[5] == "L" ? Dir::L : Dir::R;
        if (d.args[5] != "L" && d.args[5] != "R") fail(d, "direction must be L or R");
        try {
            m2.add_entry(parse_u32(d, d.args[0]), sym_id(d, d.args[1]),
                         Trans{parse_u32(d, d.args[3]), sym_id(d, d.args[4]), dd});
        } catch (const std::invalid_argument& e) {
            fail(d, e.what());
        }
    }
    for (const auto& d : defaults) {
        if (d.args.size() != 3) fail(d, "expected: default: s D t");
        Dir dd = d.args[1] == "L" ? Dir::L : Dir::R;
        if (d.args[1] != "L" && d.args[1] != "R") fail(d, "direction must be L or R");
        m2.add_default(parse_u32(d, d.args[0]), dd, parse_u32(d, d.args[2]));
    }
    m2.finalize();
    return m2;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : width_(header.size()) {
    for (size_t i = 0; i < header.size(); ++i) {
        if (i) text_ += ",";
        text_ += header[i];
    }
    text_ += "\n";
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != width_) throw std::invalid_argument("csv row width mismatch");
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i) text_ += ",";
        text_ += cells[i];
    }
    text_ += "\n";
}

std::string visit_profile_csv(const RunResult& r) {
    CsvWriter csv({"cell_index", "visits"});
    for (size_t i = 0; i < r.visits.size(); ++i)
        csv.row({std::to_string(r.visits_origin + static_cast<int64_t>(i)),
                 std::to_string(r.visits[i])});
    return csv.text();
}

}  // namespace nfa2tm
