#pragma once

// Line-oriented textual formats for automata and machines, plus the CSV
// writers shared by the harness and the CLI. One directive per line, `#`
// starts a comment, unknown directives are rejected with their line number.
//
// Automaton files:
//   kind: 1nfa | 2nfa
//   states: s0 s1 ...            (declaration order fixes the bijection)
//   alphabet: a b
//   initial: s0
//   final: s2 ...
//   trans: s a -> t              (1nfa)
//   trans: s a -> t R            (2nfa; '<' and '>' spell the endmarkers)
//
// Machine files (factored form: transitions are listed per base symbol;
// the optional countdown grade multiplies the virtual alphabet):
//   kind: dtm
//   flags: endmarked pairs       (any subset)
//   states: <count>              (states are named by index)
//   blank: _
//   endmarks: < >                (when present)
//   inputs: a b
//   work: (0|0) (0|1) ...
//   grade: 12                    (optional countdown witness)
//   rank: a=2 b=1 ...            (optional explicit rank witness)
//   initial: 0
//   final: 3 4 ...
//   view: 7 slot1                (states with non-whole views)
//   trans: 0 a -> 1 (0|1) R
//   default: 2 L 3               (fallback: rewrite what was read)

#include <iosfwd>
#include <string>
#include <variant>

#include "nfa2tm/automata.hpp"
#include "nfa2tm/tape_machine.hpp"

namespace nfa2tm {

using AutomatonValue = std::variant<OneWayNfa, TwoWayNfa>;

std::string print_automaton(const OneWayNfa& a);
std::string print_automaton(const TwoWayNfa& a);
AutomatonValue parse_automaton(const std::string& text);

std::string print_machine(const OneTapeDtm& m);
OneTapeDtm parse_machine(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// CSV with a header row, UTF-8, LF line endings.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);
    void row(const std::vector<std::string>& cells);
    const std::string& text() const { return text_; }
private:
    size_t width_;
    std::string text_;
};

std::string visit_profile_csv(const RunResult& r);

}  // namespace nfa2tm
