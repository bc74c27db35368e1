#pragma once

#include <string>
#include <vector>

#include "hawkes/rng.hpp"

namespace hawkes {

enum class KernelKind { Zero, Exponential, UniformBox, Tabulated };

// Nonnegative self-excitation kernel h on (0, infinity).
//
//   Zero                h = 0
//   Exponential(a, b)   h(t) = a e^{-b t},        t > 0
//   UniformBox(c, b)    h(t) = c on (0, b], 0 after
//   Tabulated           piecewise linear through (t_i, v_i), zero outside
//                       [t_front, t_back]
//
// Moment integrals are closed-form per kind (exact per segment for Tabulated).
class TransferFunction {
  public:
    static TransferFunction zero();
    static TransferFunction exponential(double alpha, double beta);
    static TransferFunction uniform_box(double c, double b);
    static TransferFunction tabulated(std::vector<double> grid, std::vector<double> values);
    // two-column CSV "t,value"; an optional non-numeric header line is skipped
    static TransferFunction tabulated_from_csv(const std::string& path);

    KernelKind kind() const { return kind_; }
    double param_alpha() const { return alpha_; }
    double param_beta() const { return beta_; }
    double param_c() const { return c_; }
    double param_b() const { return b_; }
    const std::vector<double>& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }

    double operator()(double t) const; // pointwise h(t)

    // integral of h over (0, inf); branching ratio of the process
    double l1_norm() const;
    // integral of t h(t) dt; finite first moment of the delay distribution
    double mean_moment() const;
    // integral of e^{theta t} h(t) dt; +infinity where it diverges
    double exp_moment(double theta) const;
    // integral of h over (0, x]
    double integral_to(double x) const;
    // integral of h over (depth, inf)
    double tail_mass(double depth) const;

    // largest theta with exp_moment(theta) <= 1, by bracketing + bisection;
    // +infinity when exp_moment stays below 1 for all theta (e.g. Zero).
    // Throws NotSubcriticalError when l1_norm() >= 1.
    double theta_star(double tol = 1e-10) const;

    // one inter-generation delay with density h / l1_norm; throws ZeroKernelError
    double sample_delay(Rng& rng) const;
    // one delay from the tail density h restricted to (depth, inf), normalized
    double sample_tail_delay(double depth, Rng& rng) const;

  private:
    TransferFunction() = default;
    KernelKind kind_ = KernelKind::Zero;
    double alpha_ = 0, beta_ = 1; // Exponential
    double c_ = 0, b_ = 1;        // UniformBox
    std::vector<double> grid_, values_;
    std::vector<double> cum_; // prefix integrals over segments (Tabulated)
};

// Birth times on (0, inf) of the direct offspring of an individual sitting at
// time -depth (depth >= 0): a Poisson(tail_mass(depth)) number of points, each
// at (U - depth) with U drawn from h restricted to (depth, inf). Sorted.
std::vector<double> truncated_offspring(const TransferFunction& h, double depth, Rng& rng);

} // namespace hawkes
