#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hawkes/estimators.hpp"
#include "hawkes/queue.hpp"
#include "hawkes/regen.hpp"
#include "hawkes/transfer.hpp"

namespace hawkes {

// One recorded comparison: the rule string spells out the tolerance so a
// report is self-describing, observed is the realized statistic, limit the
// value it must not exceed.
struct Verdict {
    std::string name;
    std::string rule;
    double observed = 0.0;
    double limit = 0.0;
    bool pass = false;
};

// A grid row of a Monte Carlo report. x is the abscissa (Laplace argument s,
// or tail level), formula the matching closed-form value. Domination rows also
// carry the dominating rate in tag and the cited cruder bound in loose.
struct GridPoint {
    double tag = 0.0;
    double x = 0.0;
    double empirical = 0.0;
    double se = 0.0;
    double formula = 0.0;
    double loose = 0.0;
};

// Monte Carlo versus closed-form comparison report. kind is one of
// "regen_moments", "queue_moments", "domination" and fixes how the grid rows
// read. Standard errors come from 50 contiguous batches. cycle_lengths keeps
// the raw samples for optional CSV dumps.
struct McReport {
    std::string kind;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    double mean = 0.0;
    double mean_se = 0.0;
    double second_moment = 0.0;
    double second_moment_se = 0.0;
    std::vector<GridPoint> grid;
    std::vector<Verdict> verdicts;
    std::vector<double> cycle_lengths;

    bool all_pass() const;
};

// Moments and Laplace transform of the regeneration time, by independent
// replication: each cycle runs the full path simulation from an empty state
// (stream = seed xor index) until its first regeneration, so no length bias
// from slicing a fixed horizon enters. Formula values are fed the service law
// rebuilt from an independent batch of simulated clusters, and each verdict
// uses 3 combined standard errors (both stages batched).
// Throws InsufficientCyclesError below 100 cycles; kernel errors propagate.
McReport mc_regen_moments(double lambda, const TransferFunction& h, double A,
                          std::size_t n_cycles, std::uint64_t seed,
                          const std::vector<double>& s_grid = {0.25, 0.5, 1.0, 2.0});

// Same report for the infinite-server queue itself: cycles are simulated
// directly (idle draw plus busy period of jobs with service law F), so the
// closed forms are exact references and the verdicts use the Monte Carlo
// standard error alone.
McReport mc_queue_moments(const ServiceCdf& F, double lambda, std::size_t n_cycles,
                          std::uint64_t seed,
                          const std::vector<double>& s_grid = {0.25, 0.5, 1.0, 2.0});

// One-sided cluster-length tail checks P(L > x) <= e^{-theta x} + 3 SE for
// each requested theta on the x grid, against one shared batch of clusters.
// Rows also record the cruder prefactor bound e^{1-p} e^{-theta x} with
// p = |h|_1 to exhibit the improvement. mean/second_moment describe the
// cluster size; cycle_lengths holds the cluster lengths.
// Throws OutOfDomainError when some theta exceeds theta_star(h).
McReport domination_report(const TransferFunction& h, const std::vector<double>& theta_grid,
                           std::size_t n_clusters, std::uint64_t seed,
                           const std::vector<double>& x_grid = {1.0, 2.0, 4.0, 8.0});

struct Sigma2Estimate {
    double sigma2 = 0.0;
    double se = 0.0;
};

// Plug-in normalized variance of the cycle rewards: mean of squared centered
// rewards divided by the mean cycle length, with a 50-batch standard error.
// Requires at least 100 complete cycles.
Sigma2Estimate clt_sigma2(const std::vector<Cycle>& cycles, const WindowFunctional& f,
                          double A, double pi_hat);

// Battery configuration for full_report. The identity battery has a fixed
// shape (unit pair kernel on [-1, 0], window 2) because it checks an exact
// path identity, not a model quantity.
struct ReportConfig {
    double lambda = 1.0;
    TransferFunction h = TransferFunction::exponential(0.5, 1.0);
    double A = 1.0;
    std::uint64_t seed = 20240817;
    std::size_t n_cycles = 20000;
    std::size_t n_clusters = 20000;
    std::vector<double> s_grid = {0.25, 0.5, 1.0, 2.0};
    std::vector<double> theta_grid;  // empty: {theta*/2, theta*}
    std::vector<double> x_grid = {1.0, 2.0, 4.0, 8.0};
    std::size_t ident_paths = 20;
    double ident_T = 50.0;
    double ergodic_T = 3000.0;
    std::size_t clt_paths = 120;
    double clt_T = 500.0;
};

// Full validation bundle. Sub-battery exceptions are collected into errors
// (prefixed with the battery and error names) rather than aborting the run;
// all_pass requires every verdict to pass and errors to be empty.
struct FullReport {
    int schema = 1;
    std::uint64_t seed = 0;
    double lambda = 0.0;
    double A = 0.0;
    McReport moments;
    McReport domination;
    std::vector<Verdict> identity;
    std::vector<Verdict> ergodic;
    std::vector<Verdict> clt;
    std::vector<std::string> errors;
    bool all_pass = false;
};

// Runs the configured battery: moments and Laplace grid, domination, boundary
// identity residuals, ergodic cross-check, and a CLT normality check.
// Throws ConfigError when the configuration itself is invalid (nonpositive
// rates or horizons, critical kernel, fewer than 100 replications).
FullReport full_report(const ReportConfig& cfg);

// JSON writers. Reports are bit-identical for identical master seeds.
void write_mc_json(const McReport& report, std::ostream& out);
void write_report_json(const FullReport& report, std::ostream& out);

}  // namespace hawkes
