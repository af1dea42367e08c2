#pragma once

// Internals shared by the construction builders: window layouts of the
// table-update bodies, the raw (pre-countdown) composite machines, and the
// calibration that measures the per-cell visit bound.

#include "nfa2tm/automata.hpp"
#include "nfa2tm/constructions.hpp"
#include "nfa2tm/machine_builder.hpp"

namespace nfa2tm::detail {

// Where the tables live inside a working window, and on which tracks.
//
//   StandaloneWide: the one-shot table-update machine. Window of n+n^2
//     cells; input tables are plain bits (track "in"), updated tables grow
//     on the work track in place, the temporary table shares the work track
//     of the gamma region, and the run ends by projecting the work track to
//     plain bits.
//   CompositeWide: one update phase of the 2NFA composite. Window of
//     n+n^2+1 cells; the old tables sit on one of two alternating tracks at
//     offsets 0..n+n^2-1, the new tables are written one cell to the right
//     on the other track, the temporary table has its own track.
//   CompositeCompact: same, but the gamma bits ride on extra tracks of the
//     first n tau cells, shrinking the window to n^2+1 cells (this realizes
//     the pre-fold of the long-input construction).
enum class LayoutKind { StandaloneWide, CompositeWide, CompositeCompact };

struct TableLayout {
    LayoutKind kind;
    uint32_t n;
    uint32_t parity = 0;  // composites alternate old/new tracks per phase

    uint32_t num_tracks() const {
        switch (kind) {
            case LayoutKind::StandaloneWide: return 2;
            case LayoutKind::CompositeWide: return 3;
            case LayoutKind::CompositeCompact: return 5;
        }
        return 0;
    }
    int64_t window_len() const {
        switch (kind) {
            case LayoutKind::StandaloneWide: return static_cast<int64_t>(n) + n * n;
            case LayoutKind::CompositeWide: return static_cast<int64_t>(n) + n * n + 1;
            case LayoutKind::CompositeCompact: return static_cast<int64_t>(n) * n + 1;
        }
        return 0;
    }
    // Cells the composite startup must seed left of the input (the window
    // minus the dispatch cell).
    int64_t table_cells() const { return window_len() - (kind == LayoutKind::StandaloneWide ? 0 : 1); }

    uint32_t tr_old_gamma() const {
        switch (kind) {
            case LayoutKind::StandaloneWide: return 0;
            case LayoutKind::CompositeWide: return parity ? 1 : 0;
            case LayoutKind::CompositeCompact: return parity ? 3 : 2;
        }
        return 0;
    }
    uint32_t tr_new_gamma() const {
        switch (kind) {
            case LayoutKind::StandaloneWide: return 1;
            case LayoutKind::CompositeWide: return parity ? 0 : 1;
            case LayoutKind::CompositeCompact: return parity ? 2 : 3;
        }
        return 0;
    }
    uint32_t tr_old_tau() const {
        switch (kind) {
            case LayoutKind::StandaloneWide: return 0;
            case LayoutKind::CompositeWide: return parity ? 1 : 0;
            case LayoutKind::CompositeCompact: return parity ? 1 : 0;
        }
        return 0;
    }
    uint32_t tr_new_tau() const {
        switch (kind) {
            case LayoutKind::StandaloneWide: return 1;
            case LayoutKind::CompositeWide: return parity ? 0 : 1;
            case LayoutKind::CompositeCompact: return parity ? 0 : 1;
        }
        return 0;
    }
    uint32_t tr_tmp() const {
        switch (kind) {
            case LayoutKind::StandaloneWide: return 1;
            case LayoutKind::CompositeWide: return 2;
            case LayoutKind::CompositeCompact: return 4;
        }
        return 0;
    }

    int64_t shift_new() const { return kind == LayoutKind::StandaloneWide ? 0 : 1; }

    int64_t old_gamma_pos(uint32_t i) const { return i; }
    int64_t new_gamma_pos(uint32_t i) const { return shift_new() + i; }
    int64_t old_tau_pos(uint32_t s, uint32_t rp) const {
        int64_t base = kind == LayoutKind::CompositeCompact ? 0 : n;
        return base + static_cast<int64_t>(s) * n + rp;
    }
    int64_t new_tau_pos(uint32_t p, uint32_t q) const {
        int64_t base = kind == LayoutKind::CompositeCompact ? 0 : n;
        return shift_new() + base + static_cast<int64_t>(p) * n + q;
    }
    int64_t tmp_pos(uint32_t r) const { return r; }
};

// The table-update body for one symbol: Z_p saturations with the
// changed-flag pass loop, the exit composition, the gamma composition, and
// (for composites) the speculative right-endmarker probe followed by an
// ExitRight("dispatch") carrying the acceptance verdict in flag "verdict".
// Standalone bodies end with the plain-bit projection and fall through to
// Accept.
ir::NodePtr make_update_body(const TwoWayNfa& a, Symbol sigma_ext, const TableLayout& lay);

// Raw sliding-window composites (no countdown grading yet). The returned
// machine agrees with the automaton oracle on every input and performs a
// bounded number of steps on each cell.
OneTapeDtm build_2nfa_composite_raw(const TwoWayNfa& a, bool compact);
OneTapeDtm build_1nfa_composite_raw(const OneWayNfa& a);

// Deterministic calibration inputs and the measured per-cell visit bound
// (times a safety factor of two).
std::vector<Word> calibration_words(const Alphabet& al, int64_t window_len);
uint64_t calibrate_visit_bound(const OneTapeDtm& raw, const std::vector<Word>& words);

uint64_t raw_run_budget(const OneTapeDtm& raw, size_t input_len);

}  // namespace nfa2tm::detail
