#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "hawkes/regen.hpp"
#include "hawkes/simulate.hpp"

namespace hawkes {

// Pair weight w supported on [-A', 0], applied to ordered gaps y - x <= 0;
// zero outside the support. A' must stay strictly below the window A it is
// used with, so that the f_w denominators are bounded away from 0 by A - A'.
class PairKernelW {
  public:
    static PairKernelW constant(double value, double support_len);
    // piecewise linear through (u_i, v_i), ascending u_i within [-A', 0];
    // support_len is -u_front
    static PairKernelW tabulated(std::vector<double> grid, std::vector<double> values);

    double support_len() const { return support_len_; }
    double sup_norm() const { return sup_norm_; }
    double operator()(double u) const;

  private:
    PairKernelW() = default;
    bool is_constant_ = true;
    double value_ = 0;
    double support_len_ = 0;
    double sup_norm_ = 0;
    std::vector<double> grid_, values_;
};

enum class FunctionalKind { Constant, Count, CountIndicator, PairKernel, Clamped };

// Bounded functional of one window's contents. Evaluation sees only the
// event times inside (t - A, t]; every kind below depends only on the count
// and the pairwise gaps, so any common time shift of the window is harmless.
class WindowFunctional {
  public:
    static WindowFunctional constant(double value);
    static WindowFunctional count();
    static WindowFunctional count_indicator(std::size_t k);
    static WindowFunctional pair_kernel(PairKernelW w);
    // mu |-> max(a, min(b, inner(mu))); output always lands in [a, b]
    static WindowFunctional clamped(WindowFunctional inner, double a, double b);

    FunctionalKind kind() const { return kind_; }

    // window: sorted event times of one window; A: the window length
    double operator()(std::span<const double> window, double A) const;

  private:
    WindowFunctional() = default;
    FunctionalKind kind_ = FunctionalKind::Constant;
    double value_ = 0;  // Constant
    std::size_t k_ = 0; // CountIndicator
    std::shared_ptr<const PairKernelW> w_;
    std::shared_ptr<const WindowFunctional> inner_; // Clamped
    double lo_ = 0, hi_ = 0;                        // Clamped range
};

// f_w(mu) = sum over ordered pairs y <= x of mu of w(y - x)/(y - x + A),
// diagonal included (each point contributes w(0)/A). mu must be sorted.
// Throws SupportViolationError unless A > w.support_len().
double f_w_functional(std::span<const double> mu, const PairKernelW& w, double A);

// (1/T) integral over [0, T] of f(window at t). The window contents are
// piecewise constant between the breakpoints {event, event + A}, so the
// integral is an exact finite sum. Events before 0 (initial condition) are
// visible to windows with t < A. Throws HorizonExceededError if T exceeds
// the simulated horizon.
double sliding_average(const PathRecord& path, const WindowFunctional& f, double A, double T);

// (1/T) sum of w(y - x) over ordered pairs -A < y <= x <= T of path events,
// diagonal included
double pair_statistic(const PathRecord& path, const PairKernelW& w, double A, double T);

// LHS - RHS of the exact relation between the two estimators:
//   LHS = pair_statistic - sliding_average of f_w over [0, T]
//   RHS = (1/T) sum over T-A < y <= x <= T of ((y-T+A)/(y-x+A)) w(y-x)
// Zero (to roundoff) whenever the path has no events at or before 0, which
// is the regime of the underlying Fubini computation.
double boundary_identity_residual(const PathRecord& path, const PairKernelW& w, double A,
                                  double T);

// Reward of one cycle: integral of f over the cycle span, plus the span
// measure accumulated with identical arithmetic (so the ratio for a constant
// functional is exact).
struct CycleReward {
    double reward = 0;
    double measure = 0;
};

CycleReward cycle_reward(const Cycle& cycle, const WindowFunctional& f, double A);

struct PiEstimate {
    double estimate = 0;
    double std_error = 0;
    std::size_t n_cycles = 0;
};

// Renewal-reward ratio estimator of the stationary window average pi^A(f):
// sum of per-cycle rewards over sum of per-cycle lengths, where the reward
// of a cycle integrates f over its span with the (-A, 0] head visible to
// early windows. Standard error by the delta method on the ratio of means.
// Throws InsufficientCyclesError below 2 cycles.
PiEstimate estimate_pi_cycles(const std::vector<Cycle>& cycles, const WindowFunctional& f,
                              double A);

} // namespace hawkes
