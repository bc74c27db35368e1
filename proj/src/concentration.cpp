#include "hawkes/concentration.hpp"

#include <cmath>
#include <stdexcept>

#include "hawkes/queue.hpp"

namespace hawkes {

namespace {

// Floor bound E[tau^A] >= e^{lambda A}/lambda: a cycle is at least an idle
// exponential plus a window-covering busy period.
double mean_tau_floor(double lambda, double A) {
    return std::exp(lambda * A) / lambda;
}

void validate(const ConcentrationInput& in) {
    if (!(in.lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    if (!(in.A >= 0.0)) throw std::invalid_argument("window length must be nonnegative");
    if (!(in.T > 0.0)) throw std::invalid_argument("horizon must be positive");
    if (!(in.a <= in.b)) throw std::invalid_argument("clamp range must satisfy a <= b");
    if (!(in.alpha > 0.0) || !(in.alpha < in.lambda)) {
        throw AlphaOutOfRangeError("alpha must lie in (0, lambda)");
    }
    // FP slack so Monte Carlo means sitting exactly on the floor pass.
    if (!(in.mean_tau >= mean_tau_floor(in.lambda, in.A) * (1.0 - 1e-9))) {
        throw std::invalid_argument("mean_tau is below the cycle-length floor e^{lambda A}/lambda");
    }
    if (!(in.exp_moment >= 1.0 - 1e-9)) {
        throw std::invalid_argument("exp_moment must be at least 1");
    }
}

}  // namespace

ConcentrationInput exact_input(double lambda, double A, double alpha,
                               double a, double b, double T,
                               double mean_tau, double exp_moment) {
    ConcentrationInput in;
    in.lambda = lambda;
    in.A = A;
    in.alpha = alpha;
    in.a = a;
    in.b = b;
    in.T = T;
    in.mean_tau = mean_tau;
    in.exp_moment = exp_moment;
    in.mode = BoundMode::Exact;
    validate(in);
    return in;
}

ConcentrationInput bound_input(double lambda, double theta, double A,
                               double alpha, double a, double b, double T) {
    if (!(theta > 0.0)) throw std::invalid_argument("theta must be positive");
    if (!(alpha > 0.0) || !(alpha < lambda) || !(alpha < theta)) {
        throw AlphaOutOfRangeError("alpha must lie in (0, min(lambda, theta))");
    }
    ConcentrationInput in;
    in.lambda = lambda;
    in.A = A;
    in.alpha = alpha;
    in.a = a;
    in.b = b;
    in.T = T;
    in.mean_tau = mean_tau(lambda, 1.0 / theta, A);
    in.exp_moment = exp_moment_tau(lambda, theta, A, alpha);
    in.mode = BoundMode::Bound;
    validate(in);
    return in;
}

BoundTerms bound_terms(const ConcentrationInput& in) {
    validate(in);
    const double range = in.b - in.a;
    const double floor_mean =
        in.mode == BoundMode::Bound ? mean_tau_floor(in.lambda, in.A) : in.mean_tau;
    BoundTerms t;
    t.v = 2.0 * range * range / (in.alpha * in.alpha) * std::floor(in.T / floor_mean) *
          in.exp_moment * std::exp(in.alpha * in.mean_tau);
    t.c = std::abs(range) / in.alpha;
    return t;
}

double deviation_bound_raw(const ConcentrationInput& in, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    const BoundTerms t = bound_terms(in);
    const double slack = in.T * eps - std::abs(in.b - in.a) * in.mean_tau;
    if (slack <= 0.0) return 4.0;
    const double denom = 2.0 * t.v + t.c * slack;
    if (denom == 0.0) return 0.0;  // a == b: the average never deviates
    return 4.0 * std::exp(-slack * slack / (4.0 * denom));
}

double deviation_bound(const ConcentrationInput& in, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    const BoundTerms t = bound_terms(in);
    const double slack = in.T * eps - std::abs(in.b - in.a) * in.mean_tau;
    if (slack <= 0.0) return 1.0;
    const double denom = 2.0 * t.v + t.c * slack;
    if (denom == 0.0) return 0.0;
    return std::min(1.0, 4.0 * std::exp(-slack * slack / (4.0 * denom)));
}

double epsilon_eta(const ConcentrationInput& in, double eta) {
    if (!(eta > 0.0) || !(eta < 1.0)) throw std::invalid_argument("eta must lie in (0, 1)");
    const BoundTerms t = bound_terms(in);
    if (t.v == 0.0 && t.c == 0.0) return 0.0;
    const double l = std::log(eta / 4.0);  // < 0
    const double disc = 4.0 * t.c * t.c * l * l - 8.0 * t.v * l;
    return (std::abs(in.b - in.a) * in.mean_tau - 2.0 * t.c * l + std::sqrt(disc)) / in.T;
}

}  // namespace hawkes
