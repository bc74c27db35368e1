#pragma once

#include "hawkes/errors.hpp"

namespace hawkes {

// Where the cycle moments supplied in ConcentrationInput come from. Exact
// means Monte Carlo estimates of E[tau] and E[e^{alpha tau}]; Bound means the
// closed-form dominating values of the exponential-service system. The mode
// changes one thing: the cycle-count floor(T / E[tau]) uses the supplied mean
// in Exact mode and the universal lower bound e^{lambda A}/lambda in Bound
// mode, which maximizes the floor and keeps the bound conservative.
enum class BoundMode { Exact, Bound };

struct ConcentrationInput {
    double lambda = 1.0;      // immigration rate
    double A = 0.0;           // window length
    double alpha = 0.1;       // moment exponent, 0 < alpha < lambda
    double a = 0.0;           // lower clamp of the window functional
    double b = 1.0;           // upper clamp, a <= b
    double T = 1.0;           // averaging horizon
    double mean_tau = 1.0;    // E[tau^A], at least e^{lambda A}/lambda
    double exp_moment = 1.0;  // E[e^{alpha tau^A}], at least 1
    BoundMode mode = BoundMode::Exact;
};

// Builds a validated input from Monte Carlo moments.
ConcentrationInput exact_input(double lambda, double A, double alpha,
                               double a, double b, double T,
                               double mean_tau, double exp_moment);

// Builds a validated input whose moments are the dominating closed forms for
// exponential service with rate theta. Requires 0 < alpha < min(lambda,
// theta); the moment computation can still refuse alpha values beyond the
// true convergence abscissa.
ConcentrationInput bound_input(double lambda, double theta, double A,
                               double alpha, double a, double b, double T);

// Variance proxy v and scale c of the Bernstein-type deviation bound:
//   v = 2 (b-a)^2 / alpha^2 * floor(T / E[tau]) * E[e^{alpha tau}] * e^{alpha E[tau]}
//   c = |b-a| / alpha
struct BoundTerms {
    double v = 0.0;
    double c = 0.0;
};

BoundTerms bound_terms(const ConcentrationInput& in);

// P(|A_T f - pi f| >= eps) <= 4 exp(-(T eps - |b-a| E[tau])^2
//                                    / (4 (2v + c (T eps - |b-a| E[tau]))))
// capped at 1, and identically 1 when T eps <= |b-a| E[tau] (the centering
// slack is exhausted). A degenerate functional (a == b) yields 0.
double deviation_bound(const ConcentrationInput& in, double eps);

// The factor-4 expression without the cap, for diagnostics. Returns 4 when
// T eps <= |b-a| E[tau].
double deviation_bound_raw(const ConcentrationInput& in, double eps);

// Inverts the bound: the deviation level whose bound equals eta in (0, 1),
//   eps_eta = (|b-a| E[tau] - 2 c log(eta/4)
//              + sqrt(4 c^2 log^2(eta/4) - 8 v log(eta/4))) / T.
// Zero for a degenerate functional.
double epsilon_eta(const ConcentrationInput& in, double eta);

}  // namespace hawkes
