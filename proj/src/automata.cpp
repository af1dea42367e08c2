#include "nfa2tm/automata.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>

namespace nfa2tm {

Alphabet::Alphabet(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.empty()) throw std::invalid_argument("alphabet must be nonempty");
    for (const auto& n : names_) {
        if (n.empty()) throw std::invalid_argument("empty symbol name");
        if (std::count(names_.begin(), names_.end(), n) != 1)
            throw std::invalid_argument("duplicate symbol name: " + n);
    }
}

std::optional<Symbol> Alphabet::find(const std::string& name) const {
    for (uint32_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return i;
    return std::nullopt;
}

bool Alphabet::single_char() const {
    return std::all_of(names_.begin(), names_.end(),
                       [](const std::string& n) { return n.size() == 1; });
}

Word Alphabet::word_from_string(const std::string& s) const {
    if (!single_char())
        throw std::invalid_argument("alphabet has multi-character symbols");
    Word w;
    w.reserve(s.size());
    for (char c : s) {
        auto sym = find(std::string(1, c));
        if (!sym) throw std::invalid_argument(std::string("symbol outside alphabet: ") + c);
        w.push_back(*sym);
    }
    return w;
}

std::string Alphabet::word_to_string(const Word& w) const {
    std::string s;
    for (Symbol sym : w) s += name(sym);
    return s;
}

OneWayNfa::OneWayNfa(uint32_t num_states, Alphabet alphabet, State initial,
                     std::vector<State> finals)
    : num_states_(num_states), alphabet_(std::move(alphabet)), initial_(initial) {
    if (num_states == 0 || num_states > 31)
        throw std::invalid_argument("state count out of supported range");
    if (initial >= num_states) throw std::invalid_argument("initial state out of range");
    for (State f : finals) {
        if (f >= num_states) throw std::invalid_argument("final state out of range");
        final_mask_ |= 1u << f;
    }
    delta_.assign(static_cast<size_t>(num_states) * alphabet_.size(), 0);
}

void OneWayNfa::add_transition(State from, Symbol sym, State to) {
    if (from >= num_states_ || to >= num_states_)
        throw std::invalid_argument("transition state out of range");
    if (sym >= alphabet_.size()) throw std::invalid_argument("transition symbol out of range");
    delta_[from * alphabet_.size() + sym] |= 1u << to;
}

std::vector<State> OneWayNfa::finals() const {
    std::vector<State> out;
    for (State q = 0; q < num_states_; ++q)
        if (is_final(q)) out.push_back(q);
    return out;
}

uint64_t OneWayNfa::size_metric() const {
    return static_cast<uint64_t>(alphabet_.size()) * num_states_ * num_states_;
}

TwoWayNfa::TwoWayNfa(uint32_t num_states, Alphabet alphabet, State initial,
                     std::vector<State> finals)
    : num_states_(num_states), alphabet_(std::move(alphabet)), initial_(initial) {
    if (num_states == 0 || num_states > 31)
        throw std::invalid_argument("state count out of supported range");
    if (initial >= num_states) throw std::invalid_argument("initial state out of range");
    for (State f : finals) {
        if (f >= num_states) throw std::invalid_argument("final state out of range");
        final_mask_ |= 1u << f;
    }
    delta_.assign(static_cast<size_t>(num_states) * num_ext_syms(), {});
}

void TwoWayNfa::add_transition(State from, Symbol ext_sym, State to, Dir d) {
    if (from >= num_states_ || to >= num_states_)
        throw std::invalid_argument("transition state out of range");
    if (ext_sym >= num_ext_syms()) throw std::invalid_argument("transition symbol out of range");
    if (ext_sym == lend() && d != Dir::R)
        throw std::invalid_argument("transition on left endmarker must move R");
    if (ext_sym == rend() && d == Dir::R && !is_final(to))
        throw std::invalid_argument("right move on right endmarker must enter a final state");
    auto& lst = delta_[from * num_ext_syms() + ext_sym];
    if (std::find(lst.begin(), lst.end(), std::make_pair(to, d)) == lst.end())
        lst.emplace_back(to, d);
}

std::vector<State> TwoWayNfa::finals() const {
    std::vector<State> out;
    for (State q = 0; q < num_states_; ++q)
        if (is_final(q)) out.push_back(q);
    return out;
}

uint64_t TwoWayNfa::size_metric() const {
    return static_cast<uint64_t>(alphabet_.size()) * num_states_ * num_states_;
}

std::vector<uint8_t> ReachTables::to_bits() const {
    std::vector<uint8_t> bits(n + static_cast<size_t>(n) * n, 0);
    for (State i = 0; i < n; ++i) bits[i] = (gamma >> i) & 1u;
    for (State i = 0; i < n; ++i)
        for (State j = 0; j < n; ++j)
            bits[n + static_cast<size_t>(i) * n + j] = (tau_rows[i] >> j) & 1u;
    return bits;
}

ReachTables ReachTables::from_bits(uint32_t n, const std::vector<uint8_t>& bits) {
    if (bits.size() != n + static_cast<size_t>(n) * n)
        throw std::invalid_argument("bit word has wrong length");
    ReachTables t;
    t.n = n;
    t.tau_rows.assign(n, 0);
    for (State i = 0; i < n; ++i)
        if (bits[i]) t.gamma |= 1u << i;
    for (State i = 0; i < n; ++i)
        for (State j = 0; j < n; ++j)
            if (bits[n + static_cast<size_t>(i) * n + j]) t.tau_rows[i] |= 1u << j;
    return t;
}

TapePrefix TapePrefix::of_word(const TwoWayNfa& a, const Word& w, bool with_rend) {
    TapePrefix p;
    p.ext.push_back(a.lend());
    for (Symbol s : w) {
        if (s >= a.alphabet().size())
            throw std::invalid_argument("symbol outside alphabet");
        p.ext.push_back(s);
    }
    if (with_rend) p.ext.push_back(a.rend());
    return p;
}

namespace {

void check_word(const Alphabet& a, const Word& w) {
    for (Symbol s : w)
        if (s >= a.size()) throw std::invalid_argument("symbol outside alphabet");
}

}  // namespace

bool accepts_2nfa(const TwoWayNfa& a, const Word& w) {
    check_word(a.alphabet(), w);
    const uint32_t n = a.num_states();
    const uint32_t m = static_cast<uint32_t>(w.size());
    // Node (q, i) for i in 0..m+1; the node set is Q x positions plus the
    // accepting exit (q_f, m+2), which we fold into the final check.
    auto sym_at = [&](uint32_t i) -> Symbol {
        if (i == 0) return a.lend();
        if (i == m + 1) return a.rend();
        return w[i - 1];
    };
    std::vector<uint8_t> seen(static_cast<size_t>(n) * (m + 2), 0);
    std::deque<std::pair<State, uint32_t>> queue;
    seen[a.initial() * (m + 2) + 0] = 1;
    queue.emplace_back(a.initial(), 0);
    while (!queue.empty()) {
        auto [q, i] = queue.front();
        queue.pop_front();
        for (auto [t, d] : a.moves(q, sym_at(i))) {
            int j = static_cast<int>(i) + dir_delta(d);
            if (j == static_cast<int>(m) + 2) {
                if (a.is_final(t)) return true;  // violated the right endmarker
                continue;
            }
            if (j < 0 || j > static_cast<int>(m) + 1) continue;
            size_t idx = static_cast<size_t>(t) * (m + 2) + j;
            if (!seen[idx]) {
                seen[idx] = 1;
                queue.emplace_back(t, static_cast<uint32_t>(j));
            }
        }
    }
    return false;
}

bool accepts_1nfa(const OneWayNfa& a, const Word& w) {
    check_word(a.alphabet(), w);
    uint32_t cur = 1u << a.initial();
    for (Symbol s : w) {
        uint32_t next = 0;
        uint32_t rest = cur;
        while (rest) {
            State q = static_cast<State>(std::countr_zero(rest));
            rest &= rest - 1;
            next |= a.targets(q, s);
        }
        cur = next;
        if (!cur) break;
    }
    return (cur & a.final_mask()) != 0;
}

ReachTables gamma_tau_oracle(const TwoWayNfa& a, const TapePrefix& zx) {
    if (zx.ext.empty() || zx.ext.front() != a.lend())
        throw std::invalid_argument("prefix must start with the left endmarker");
    for (size_t i = 1; i < zx.ext.size(); ++i)
        if (zx.ext[i] == a.lend() ||
            (zx.ext[i] == a.rend() && i + 1 != zx.ext.size()))
            throw std::invalid_argument("malformed prefix");

    const uint32_t n = a.num_states();
    const uint32_t len = static_cast<uint32_t>(zx.ext.size());
    // Partial configurations (q, i) with i in 0..len-1 plus exit-right
    // pseudo-nodes. reach_from(src) floods within the segment and records
    // which states exit to the right of cell len-1.
    auto reach_exits = [&](State src, uint32_t src_pos) -> uint32_t {
        std::vector<uint8_t> seen(static_cast<size_t>(n) * len, 0);
        std::deque<std::pair<State, uint32_t>> queue;
        seen[src * len + src_pos] = 1;
        queue.emplace_back(src, src_pos);
        uint32_t exits = 0;
        while (!queue.empty()) {
            auto [q, i] = queue.front();
            queue.pop_front();
            for (auto [t, d] : a.moves(q, zx.ext[i])) {
                int j = static_cast<int>(i) + dir_delta(d);
                if (j < 0) continue;  // cannot happen: lend forces R
                if (j == static_cast<int>(len)) {
                    exits |= 1u << t;
                    continue;
                }
                size_t idx = static_cast<size_t>(t) * len + j;
                if (!seen[idx]) {
                    seen[idx] = 1;
                    queue.emplace_back(t, static_cast<uint32_t>(j));
                }
            }
        }
        return exits;
    };

    ReachTables t;
    t.n = n;
    t.tau_rows.assign(n, 0);
    for (State p = 0; p < n; ++p) t.tau_rows[p] = reach_exits(p, len - 1);
    t.gamma = reach_exits(a.initial(), 0);
    return t;
}

ClosureResult z_p_closure(const TwoWayNfa& a, const ReachTables& t, Symbol ext_sym,
                          State p) {
    const uint32_t n = a.num_states();
    ClosureResult res;
    res.set = 1u << p;
    // Least fixed point: r in Z, (s,L) in delta(r,sigma), (s,r') in tau_z
    // implies r' in Z. A pass that adds nothing ends the loop; at most n
    // passes are ever needed.
    for (;;) {
        ++res.passes;
        uint32_t before = res.set;
        for (State r = 0; r < n; ++r) {
            if (!((res.set >> r) & 1u)) continue;
            for (auto [s, d] : a.moves(r, ext_sym)) {
                if (d != Dir::L) continue;
                res.set |= t.tau_rows[s];
            }
        }
        if (res.set == before) break;
    }
    return res;
}

ReachTables tables_for_lend(const TwoWayNfa& a) {
    // Saturation restricted to the single left-endmarker cell: no left move
    // can occur on it, so every chain has length zero.
    const uint32_t n = a.num_states();
    ReachTables t;
    t.n = n;
    t.tau_rows.assign(n, 0);
    ReachTables empty;
    empty.n = n;
    empty.tau_rows.assign(n, 0);
    for (State p = 0; p < n; ++p) {
        uint32_t z = z_p_closure(a, empty, a.lend(), p).set;
        uint32_t row = 0;
        for (State r = 0; r < n; ++r) {
            if (!((z >> r) & 1u)) continue;
            for (auto [q, d] : a.moves(r, a.lend()))
                if (d == Dir::R) row |= 1u << q;
        }
        t.tau_rows[p] = row;
    }
    t.gamma = t.tau_rows[a.initial()];
    return t;
}

ReachTables update_tables(const TwoWayNfa& a, const ReachTables& t, Symbol ext_sym) {
    if (t.n != a.num_states()) throw std::invalid_argument("table size mismatch");
    if (ext_sym >= a.num_ext_syms() || ext_sym == a.lend())
        throw std::invalid_argument("update symbol must be an input symbol or the right endmarker");
    const uint32_t n = a.num_states();
    ReachTables out;
    out.n = n;
    out.tau_rows.assign(n, 0);
    for (State p = 0; p < n; ++p) {
        uint32_t z = z_p_closure(a, t, ext_sym, p).set;
        uint32_t row = 0;
        for (State r = 0; r < n; ++r) {
            if (!((z >> r) & 1u)) continue;
            for (auto [q, d] : a.moves(r, ext_sym))
                if (d == Dir::R) row |= 1u << q;
        }
        out.tau_rows[p] = row;
    }
    for (State p = 0; p < n; ++p)
        if ((t.gamma >> p) & 1u) out.gamma |= out.tau_rows[p];
    return out;
}

bool accepts_via_tables(const TwoWayNfa& a, const Word& w) {
    check_word(a.alphabet(), w);
    ReachTables t = tables_for_lend(a);
    for (Symbol s : w) t = update_tables(a, t, s);
    t = update_tables(a, t, a.rend());
    return (t.gamma & a.final_mask()) != 0;
}

OneWayNfa short_string_classifier(const TwoWayNfa& a, uint32_t len_max) {
    const Alphabet& sigma = a.alphabet();
    // Trie node ids in BFS order: node for word w at depth d, children in
    // symbol order. One extra sink state at the end.
    std::vector<Word> nodes;
    nodes.push_back({});
    size_t level_begin = 0;
    for (uint32_t d = 0; d < len_max; ++d) {
        size_t level_end = nodes.size();
        for (size_t i = level_begin; i < level_end; ++i)
            for (Symbol s = 0; s < sigma.size(); ++s) {
                Word w = nodes[i];
                w.push_back(s);
                nodes.push_back(std::move(w));
            }
        level_begin = level_end;
    }
    uint32_t sink = static_cast<uint32_t>(nodes.size());
    std::vector<State> finals;
    for (uint32_t i = 0; i < nodes.size(); ++i)
        if (accepts_2nfa(a, nodes[i])) finals.push_back(i);
    OneWayNfa trie(sink + 1, sigma, 0, finals);
    // Parent->child edges follow from the BFS layout; everything at depth
    // len_max and the sink loop to the sink.
    size_t child = 1;
    for (uint32_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].size() < len_max) {
            for (Symbol s = 0; s < sigma.size(); ++s)
                trie.add_transition(i, s, static_cast<State>(child++));
        } else {
            for (Symbol s = 0; s < sigma.size(); ++s) trie.add_transition(i, s, sink);
        }
    }
    for (Symbol s = 0; s < sigma.size(); ++s) trie.add_transition(sink, s, sink);
    return trie;
}

std::vector<Word> all_words_of_length(const Alphabet& a, uint32_t len) {
    std::vector<Word> out;
    Word w(len, 0);
    for (;;) {
        out.push_back(w);
        uint32_t i = len;
        while (i > 0) {
            if (++w[i - 1] < a.size()) break;
            w[i - 1] = 0;
            --i;
        }
        if (i == 0) break;
    }
    return out;
}

std::vector<Word> all_words_up_to(const Alphabet& a, uint32_t len_max) {
    std::vector<Word> out;
    for (uint32_t len = 0; len <= len_max; ++len) {
        auto batch = all_words_of_length(a, len);
        out.insert(out.end(), batch.begin(), batch.end());
    }
    return out;
}

}  // namespace nfa2tm
