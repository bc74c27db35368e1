#pragma once

#include <complex>
#include <vector>

#include "hawkes/errors.hpp"

namespace hawkes {

enum class ServiceKind { Degenerate, ExpDom, Empirical };

// Service-time law of the M/G/infty system whose busy periods delimit the
// regeneration windows: a job started by a cluster of length L occupies the
// server for L + A. The cdf is F^A(x) = F(x - A) where F is the law of L.
//
//   Degenerate      L = 0            (zero kernel; pure window)
//   ExpDom(theta)   L ~ Exp(theta)   (dominating law from exp_moment <= 1)
//   Empirical       L ~ uniform draw from a stored sample; cdf and
//                   compensator are exact step/piecewise-linear forms
class ServiceCdf {
  public:
    static ServiceCdf degenerate(double A);
    static ServiceCdf exp_dom(double theta, double A);
    static ServiceCdf empirical(std::vector<double> lengths, double A);

    ServiceKind kind() const { return kind_; }
    double window() const { return A_; }
    double theta() const;                       // ExpDom only
    const std::vector<double>& lengths() const; // Empirical only, sorted

    double mean_service() const; // E[L] + A
    double cdf(double x) const;  // F^A(x)

    // C(t) = integral over (0, t] of 1 - F^A; C(0) = 0, C(inf) = E[L] + A.
    // Closed form per kind: min(t, A) for Degenerate, exponential ramp for
    // ExpDom, (1/n) sum min(L_i, t - A) + min(t, A) for Empirical.
    double compensator(double t) const;
    double total_compensator() const;

  private:
    ServiceCdf() = default;
    ServiceKind kind_ = ServiceKind::Degenerate;
    double A_ = 0;
    double theta_ = 1;            // ExpDom
    std::vector<double> lengths_; // Empirical, sorted ascending
    std::vector<double> prefix_;  // prefix sums of lengths_
};

// value +- abs_error, the error being a numerical-route bound (quadrature
// estimate, series truncation), not a statistical one
struct LaplaceResult {
    double value = 0;
    double abs_error = 0;
};

struct ComplexLaplace {
    std::complex<double> value{};
    double abs_error = 0;
};

// I(s) = integral over (0, inf) of e^{-s t - lambda C(t)} dt.
//
// Degenerate/ExpDom: adaptive quadrature split at the kinks, plus an analytic
// tail once 1 - F^A has decayed below 1e-14. Empirical: exact segment-by-
// segment closed form (C is piecewise linear). Requires s > 0 except for
// ExpDom, where -min(lambda, theta) < s < 0 is reached through the shifted
// Kummer series; elsewhere the integral diverges and there is no
// continuation route, so OutOfDomainError.
LaplaceResult integral_I(const ServiceCdf& F, double lambda, double s);
// complex frequencies, Re(s) > 0 only
ComplexLaplace integral_I(const ServiceCdf& F, double lambda, std::complex<double> s);

// I(s) for the A = 0 exponential-service system, by the series
//
//   J(s) = (e^{-z} / theta) sum_{n>=0} z^n / (n! (s/theta + n)),  z = lambda/theta,
//
// truncated when a term falls below 1e-16 of the partial sum (cap 1e4 terms).
// Valid for any s with s/theta not in {0, -1, -2, ...}; at those points
// PoleError. This is the series route; integral_I is the quadrature route,
// and the two are kept independent so they can cross-check each other.
LaplaceResult kummer_J(double lambda, double theta, double s);

// E[e^{-s tau^A}] = 1 - 1/((lambda + s) I(s)) for the stationary cycle tau^A.
//
// For s < 0 (ExpDom only) the series continuation is trusted only where it
// is provably on the convergent branch: the abscissa of convergence is the
// largest zero of the continued I, so a nonnegative I means e^{|s| tau} has
// already diverged and the value would be spurious; OutOfDomainError there.
LaplaceResult laplace_tau(const ServiceCdf& F, double lambda, double s);
ComplexLaplace laplace_tau(const ServiceCdf& F, double lambda, std::complex<double> s);

// E[e^{-s beta^A}] for the busy period beta^A, two independent routes:
//   Product   (lambda + s)/lambda * E[e^{-s tau^A}]   (cycle = idle + busy)
//   Ratio     integral of F^A e^{-s t - lambda C} over integral of e^{-s t - lambda C}
// Ratio is quadrature-only and requires s > 0; Product follows laplace_tau.
enum class BusyRoute { Product, Ratio };
LaplaceResult laplace_busy(const ServiceCdf& F, double lambda, double s,
                           BusyRoute route = BusyRoute::Product);

// Transforms of the A = 0 system at the same s, used to reconstruct the
// window-A transforms without re-integrating:
//
//   E[e^{-s tau^A}]  = 1 - e^{(lambda+s)A} / (e^{(lambda+s)A} - 1 + 1/(1 - tau0))
//   E[e^{-s beta^A}] = (lambda+s)/lambda - (1/lambda) / ( (1 - e^{-(lambda+s)A})/(lambda+s)
//                      + e^{-(lambda+s)A} / (lambda + s - lambda busy0) )
//
// Throws DegenerateDenominatorError where a denominator vanishes (s = 0).
struct BaseTransforms {
    double tau0 = 0;  // E[e^{-s tau^0}]
    double busy0 = 0; // E[e^{-s beta^0}]
};
struct ShiftedTransforms {
    double tau = 0;
    double busy = 0;
};
ShiftedTransforms shift_relations(double lambda, double A, double s, BaseTransforms base);

// E[tau^A] = (1/lambda) e^{lambda (mean_len + A)}, exact
double mean_tau(double lambda, double mean_len, double A);

// E[(tau^A)^2] = (2/lambda) e^{2 lambda C_inf} D + (2/lambda^2) e^{lambda C_inf}
// with D = integral of (e^{-lambda C(t)} - e^{-lambda C_inf}) over (0, inf)
double second_moment_tau(const ServiceCdf& F, double lambda);

// E[e^{alpha tau^A}] for exponential-service domination; requires
// 0 < alpha < min(lambda, theta) and a convergent continuation, else
// OutOfDomainError
double exp_moment_tau(double lambda, double theta, double A, double alpha);

// E[(tau^A)^2] / (2 E[tau^A]) for the ExpDom(theta) system: mean residual
// cycle seen by a stationary observer, the natural scale of the initial delay
double delay_bound(double lambda, double theta, double A);

} // namespace hawkes
