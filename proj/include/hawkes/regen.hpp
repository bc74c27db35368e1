#pragma once

#include <iosfwd>
#include <vector>

#include "hawkes/simulate.hpp"

namespace hawkes {

struct Job {
    double arrival;
    double service; // >= 0
};

struct BusyPeriod {
    double start;
    double end;
};

// Maximal busy intervals of an infinite-server queue, one left-to-right pass.
// An arrival exactly at the running end opens a new period (windows are
// half-open (t-A, t], so the tie closes the old period first).
// Throws UnsortedInputError when arrivals decrease.
std::vector<BusyPeriod> busy_sweep(const std::vector<Job>& jobs);

// Regeneration structure of a path for window width A. tau0 is the first time
// the window (t-A, t] dies out (NaN when that happens beyond the horizon);
// taus are the later regeneration times up to the horizon, strictly increasing.
struct RegenReport {
    double A = 0.0;
    double horizon = 0.0;
    double tau0 = 0.0;
    std::vector<double> taus;
    std::vector<double> cycle_lengths; // diffs of (tau0, taus...)
    bool incomplete_tail = true;       // path does not end exactly at a regeneration
};

// Sweeps jobs (ancestor arrival, cluster length + A), plus one job at 0
// covering the initial condition's footprint on (-A, infinity), when present.
RegenReport regeneration_times(const PathRecord& path, double A);

// One regeneration cycle: points of the path in (start - A, start + length],
// shifted so the cycle starts at 0. The delay keeps absolute times.
struct Cycle {
    double length = 0.0;
    std::vector<double> times;
};

struct CycleDecomposition {
    Cycle delay;               // points in (-A, tau0], length tau0
    std::vector<Cycle> cycles; // complete cycles only
};

// Throws MismatchedReportError when the report was built for another horizon.
CycleDecomposition extract_cycles(const PathRecord& path, const RegenReport& report);

// Certifies the report against the genealogy directly: at each reported time
// tau, every cluster rooted at or before tau (and the whole initial footprint)
// is extinct by tau - A.
bool verify_regeneration(const PathRecord& path, const RegenReport& report);

// JSON {A, tau0, taus, cycle_lengths, incomplete_tail}; tau0 is null when the
// first regeneration lies beyond the horizon.
void write_regen_json(const RegenReport& report, std::ostream& out);

} // namespace hawkes
