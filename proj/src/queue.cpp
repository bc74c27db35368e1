#include "hawkes/queue.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "hawkes/numeric.hpp"

namespace hawkes {

namespace {

// Intervals on which 1 - F^A is constant, for the exact summation over an
// Empirical cdf: [0, A) with slope 1, then one interval per distinct length.
// The zero-slope tail beyond A + max length is handled by callers.
struct Segment {
    double start;
    double len;
    double slope; // d/dt C(t) on the interval, = 1 - F^A there
};

std::vector<Segment> empirical_segments(const ServiceCdf& F) {
    const auto& L = F.lengths();
    const double A = F.window();
    const double n = static_cast<double>(L.size());
    std::vector<Segment> segs;
    if (A > 0) segs.push_back({0.0, A, 1.0});
    double prev = 0.0;
    std::size_t done = 0; // lengths strictly below the current offset
    for (std::size_t i = 0; i < L.size();) {
        std::size_t j = i;
        while (j < L.size() && L[j] == L[i]) ++j;
        if (L[i] > prev) {
            segs.push_back({A + prev, L[i] - prev, (n - static_cast<double>(done)) / n});
            prev = L[i];
        }
        done = j;
        i = j;
    }
    return segs;
}

// where the quadrature stops and the analytic tail takes over: the point past
// which 1 - F^A < 1e-14 (immediately at A for a degenerate law)
double tail_start(const ServiceCdf& F) {
    return F.kind() == ServiceKind::Degenerate ? F.window() : F.window() + 34.0 / F.theta();
}

// quadrature route for the closed-form compensators (Degenerate, ExpDom);
// Re(s) > 0 guaranteed by callers
template <class S>
std::pair<S, double> integral_quad(const ServiceCdf& F, double lambda, S s) {
    const double t_star = tail_start(F);
    num::QuadResult<S> q;
    if (t_star > 0) {
        q = num::integrate_segments(
            [&](double t) { return std::exp(-s * t - lambda * F.compensator(t)); },
            {0.0, F.window(), t_star}, 1e-12);
    }
    const double cinf = F.total_compensator();
    const S tail = std::exp(-s * t_star - lambda * cinf) / s;
    // on the tail C(t) sits between C(t_star) and C_inf; the bracket width
    // bounds the bias of freezing it at C_inf (zero for Degenerate)
    const double slack = std::expm1(lambda * (cinf - F.compensator(t_star)));
    return {q.value + tail, q.abs_error + slack * std::abs(tail)};
}

// same with the integrand weighted by F^A, the numerator of the ratio form;
// F^A vanishes below A so the quadrature starts there
template <class S>
std::pair<S, double> integral_quad_weighted(const ServiceCdf& F, double lambda, S s) {
    const double t_star = tail_start(F);
    num::QuadResult<S> q;
    if (t_star > F.window()) {
        q = num::integrate_segments(
            [&](double t) { return F.cdf(t) * std::exp(-s * t - lambda * F.compensator(t)); },
            {F.window(), t_star}, 1e-12);
    }
    const double cinf = F.total_compensator();
    const S tail = std::exp(-s * t_star - lambda * cinf) / s;
    const double slack = std::expm1(lambda * (cinf - F.compensator(t_star))) + (1.0 - F.cdf(t_star));
    return {q.value + tail, q.abs_error + slack * std::abs(tail)};
}

// exact route for Empirical: C is piecewise linear, so each interval
// contributes e^{-s a - lambda C(a)} (1 - e^{-(s + lambda m) d})/(s + lambda m)
template <class S>
std::pair<S, double> integral_exact(const ServiceCdf& F, double lambda, S s, bool weighted) {
    S total{};
    double roundoff = 0;
    double c = 0; // C at the interval start
    double t = 0;
    for (const auto& g : empirical_segments(F)) {
        const double w = weighted ? 1.0 - g.slope : 1.0; // F^A = 1 - slope there
        if (w != 0.0) {
            const S piece =
                w * std::exp(-s * g.start - lambda * c) * num::one_minus_exp_over(s + lambda * g.slope, g.len);
            total += piece;
            roundoff += std::abs(piece);
        }
        c += g.slope * g.len;
        t = g.start + g.len;
    }
    const S tail = std::exp(-s * t - lambda * c) / s; // F^A = 1, C = C_inf from here on
    total += tail;
    roundoff += std::abs(tail);
    return {total, 8e-16 * roundoff};
}

template <class S>
std::pair<S, double> integral_positive(const ServiceCdf& F, double lambda, S s) {
    if (F.kind() == ServiceKind::Empirical) return integral_exact(F, lambda, s, false);
    return integral_quad(F, lambda, s);
}

} // namespace

// ---------------------------------------------------------------------------
// ServiceCdf
// ---------------------------------------------------------------------------

ServiceCdf ServiceCdf::degenerate(double A) {
    if (!(A >= 0)) throw std::invalid_argument("window A must be >= 0");
    ServiceCdf f;
    f.kind_ = ServiceKind::Degenerate;
    f.A_ = A;
    return f;
}

ServiceCdf ServiceCdf::exp_dom(double theta, double A) {
    if (!(theta > 0)) throw std::invalid_argument("theta must be positive");
    if (!(A >= 0)) throw std::invalid_argument("window A must be >= 0");
    ServiceCdf f;
    f.kind_ = ServiceKind::ExpDom;
    f.A_ = A;
    f.theta_ = theta;
    return f;
}

ServiceCdf ServiceCdf::empirical(std::vector<double> lengths, double A) {
    if (lengths.empty()) throw std::invalid_argument("empirical law needs at least one length");
    if (!(A >= 0)) throw std::invalid_argument("window A must be >= 0");
    for (double l : lengths)
        if (!(l >= 0)) throw std::invalid_argument("lengths must be >= 0");
    std::sort(lengths.begin(), lengths.end());
    ServiceCdf f;
    f.kind_ = ServiceKind::Empirical;
    f.A_ = A;
    f.lengths_ = std::move(lengths);
    f.prefix_.resize(f.lengths_.size() + 1, 0.0);
    for (std::size_t i = 0; i < f.lengths_.size(); ++i)
        f.prefix_[i + 1] = f.prefix_[i] + f.lengths_[i];
    return f;
}

double ServiceCdf::theta() const {
    if (kind_ != ServiceKind::ExpDom) throw std::logic_error("theta() needs an ExpDom law");
    return theta_;
}

const std::vector<double>& ServiceCdf::lengths() const {
    if (kind_ != ServiceKind::Empirical) throw std::logic_error("lengths() needs an Empirical law");
    return lengths_;
}

double ServiceCdf::mean_service() const {
    switch (kind_) {
    case ServiceKind::Degenerate: return A_;
    case ServiceKind::ExpDom: return A_ + 1.0 / theta_;
    case ServiceKind::Empirical:
        return A_ + prefix_.back() / static_cast<double>(lengths_.size());
    }
    return 0;
}

double ServiceCdf::cdf(double x) const {
    if (x < A_) return 0.0;
    const double y = x - A_;
    switch (kind_) {
    case ServiceKind::Degenerate: return 1.0;
    case ServiceKind::ExpDom: return -std::expm1(-theta_ * y);
    case ServiceKind::Empirical: {
        const auto it = std::upper_bound(lengths_.begin(), lengths_.end(), y);
        return static_cast<double>(it - lengths_.begin()) / static_cast<double>(lengths_.size());
    }
    }
    return 0;
}

double ServiceCdf::compensator(double t) const {
    if (!(t >= 0)) throw std::invalid_argument("compensator needs t >= 0");
    if (t <= A_) return t;
    const double y = t - A_;
    switch (kind_) {
    case ServiceKind::Degenerate: return A_;
    case ServiceKind::ExpDom: return A_ + num::one_minus_exp_over(theta_, y);
    case ServiceKind::Empirical: {
        const auto it = std::upper_bound(lengths_.begin(), lengths_.end(), y);
        const auto k = static_cast<std::size_t>(it - lengths_.begin());
        const double n = static_cast<double>(lengths_.size());
        return A_ + (prefix_[k] + (n - static_cast<double>(k)) * y) / n;
    }
    }
    return 0;
}

double ServiceCdf::total_compensator() const { return mean_service(); }

// ---------------------------------------------------------------------------
// Transforms
// ---------------------------------------------------------------------------

LaplaceResult kummer_J(double lambda, double theta, double s) {
    if (!(lambda >= 0)) throw std::invalid_argument("lambda must be >= 0");
    if (!(theta > 0)) throw std::invalid_argument("theta must be positive");
    const double x = s / theta;
    if (x <= 0.0 && x == std::round(x)) throw PoleError(x);
    const double z = lambda / theta;
    double sum = 0, mag = 0, last = 0;
    double term = 1; // z^n / n!
    for (std::size_t n = 0; n < 10000; ++n) {
        last = term / (x + static_cast<double>(n));
        sum += last;
        mag += std::abs(last);
        // stop once terms are decreasing (past n = z, with x + n clear of 0)
        // and the last one no longer moves the sum
        if (static_cast<double>(n) > z && x + static_cast<double>(n) > 1.0 &&
            std::abs(last) <= 1e-16 * std::abs(sum))
            break;
        term *= z / static_cast<double>(n + 1);
    }
    const double scale = std::exp(-z) / theta;
    return {scale * sum, scale * (2.0 * std::abs(last) + 1e-16 * mag)};
}

LaplaceResult integral_I(const ServiceCdf& F, double lambda, double s) {
    if (!(lambda >= 0)) throw std::invalid_argument("lambda must be >= 0");
    if (s > 0) {
        auto [v, e] = integral_positive(F, lambda, s);
        return {v, e};
    }
    if (F.kind() != ServiceKind::ExpDom)
        throw OutOfDomainError("I(s) diverges for s <= 0 and this service law has no "
                               "continuation route");
    if (s == 0.0) throw OutOfDomainError("I(0) diverges: the integrand tends to e^{-lambda C_inf}");
    if (!(s > -std::min(lambda, F.theta())))
        throw OutOfDomainError("the shifted series continues I only on -min(lambda, theta) < s < 0");
    // split at A where C turns exponential; the head is elementary and the
    // remainder is the A = 0 integral started from level C(A) = A
    const auto base = kummer_J(lambda, F.theta(), s); // may throw PoleError
    const double x = lambda + s;                      // > 0 inside the band
    const double head = num::one_minus_exp_over(x, F.window());
    const double shift = std::exp(-x * F.window());
    return {head + shift * base.value, shift * base.abs_error + 2e-16 * std::abs(head)};
}

ComplexLaplace integral_I(const ServiceCdf& F, double lambda, std::complex<double> s) {
    if (!(lambda >= 0)) throw std::invalid_argument("lambda must be >= 0");
    if (!(s.real() > 0)) throw OutOfDomainError("complex frequencies need Re(s) > 0");
    auto [v, e] = F.kind() == ServiceKind::Empirical ? integral_exact(F, lambda, s, false)
                                                     : integral_quad(F, lambda, s);
    return {v, e};
}

LaplaceResult laplace_tau(const ServiceCdf& F, double lambda, double s) {
    if (!(lambda > 0)) throw std::invalid_argument("lambda must be positive");
    const auto I = integral_I(F, lambda, s);
    // the abscissa of convergence is the largest zero of the continued I, so
    // a nonnegative I at s < 0 means E[e^{|s| tau}] is already infinite
    if (s < 0.0 && !(I.value < 0.0))
        throw OutOfDomainError("s is at or below the abscissa of convergence: "
                               "the continued integral is nonnegative");
    const double value = 1.0 - 1.0 / ((lambda + s) * I.value);
    const double err =
        I.abs_error / ((lambda + s) * I.value * I.value) + 4e-16 * (1.0 + std::abs(value));
    return {value, std::abs(err)};
}

ComplexLaplace laplace_tau(const ServiceCdf& F, double lambda, std::complex<double> s) {
    if (!(lambda > 0)) throw std::invalid_argument("lambda must be positive");
    const auto I = integral_I(F, lambda, s);
    const std::complex<double> value = 1.0 - 1.0 / ((lambda + s) * I.value);
    const double err =
        I.abs_error / (std::abs(lambda + s) * std::norm(I.value)) + 4e-16 * (1.0 + std::abs(value));
    return {value, err};
}

LaplaceResult laplace_busy(const ServiceCdf& F, double lambda, double s, BusyRoute route) {
    if (!(lambda > 0)) throw std::invalid_argument("lambda must be positive");
    if (route == BusyRoute::Product) {
        const auto lt = laplace_tau(F, lambda, s);
        const double f = (lambda + s) / lambda;
        return {f * lt.value, std::abs(f) * lt.abs_error};
    }
    if (!(s > 0))
        throw OutOfDomainError("the ratio route integrates the weighted kernel and needs s > 0");
    const auto [num_v, num_e] = F.kind() == ServiceKind::Empirical
                                    ? integral_exact(F, lambda, s, true)
                                    : integral_quad_weighted(F, lambda, s);
    const auto [den_v, den_e] = integral_positive(F, lambda, s);
    const double value = num_v / den_v;
    return {value, num_e / den_v + std::abs(value) * den_e / den_v};
}

ShiftedTransforms shift_relations(double lambda, double A, double s, BaseTransforms base) {
    if (!(lambda > 0)) throw std::invalid_argument("lambda must be positive");
    if (!(A >= 0)) throw std::invalid_argument("window A must be >= 0");
    const double x = lambda + s;
    const double idle = 1.0 - base.tau0;
    if (idle == 0.0) throw DegenerateDenominatorError("1 - E[e^{-s tau^0}] vanishes (s = 0)");
    const double busy_den = x - lambda * base.busy0;
    if (busy_den == 0.0)
        throw DegenerateDenominatorError("lambda + s - lambda E[e^{-s beta^0}] vanishes (s = 0)");
    const double grow = std::exp(x * A);
    const double tau = 1.0 - grow / (grow - 1.0 + 1.0 / idle);
    const double bracket = num::one_minus_exp_over(x, A) + std::exp(-x * A) / busy_den;
    const double busy = x / lambda - 1.0 / (lambda * bracket);
    return {tau, busy};
}

double mean_tau(double lambda, double mean_len, double A) {
    if (!(lambda > 0)) throw std::invalid_argument("lambda must be positive");
    if (!(mean_len >= 0) || !(A >= 0))
        throw std::invalid_argument("mean_len and A must be >= 0");
    return std::exp(lambda * (mean_len + A)) / lambda;
}

double second_moment_tau(const ServiceCdf& F, double lambda) {
    if (!(lambda > 0)) throw std::invalid_argument("lambda must be positive");
    const double cinf = F.total_compensator();
    const double floor = std::exp(-lambda * cinf);
    double D = 0;
    switch (F.kind()) {
    case ServiceKind::Degenerate: {
        const double A = F.window();
        if (A > 0)
            D = num::integrate([&](double t) { return std::exp(-lambda * t) - floor; }, 0.0, A,
                               1e-12)
                    .value;
        break;
    }
    case ServiceKind::ExpDom: {
        const double t_star = tail_start(F);
        D = num::integrate_segments(
                [&](double t) { return std::exp(-lambda * F.compensator(t)) - floor; },
                {0.0, F.window(), t_star}, 1e-12)
                .value;
        // leading term of the tail, where C_inf - C(t) = e^{-theta (t-A)}/theta
        const double th = F.theta();
        D += floor * lambda * std::exp(-th * (t_star - F.window())) / (th * th);
        break;
    }
    case ServiceKind::Empirical: {
        double c = 0;
        for (const auto& g : empirical_segments(F)) {
            D += std::exp(-lambda * c) * num::one_minus_exp_over(lambda * g.slope, g.len) -
                 floor * g.len;
            c += g.slope * g.len;
        }
        break;
    }
    }
    return (2.0 / lambda) * std::exp(2.0 * lambda * cinf) * D +
           (2.0 / (lambda * lambda)) * std::exp(lambda * cinf);
}

double exp_moment_tau(double lambda, double theta, double A, double alpha) {
    if (!(lambda > 0) || !(theta > 0)) throw std::invalid_argument("rates must be positive");
    if (!(A >= 0)) throw std::invalid_argument("window A must be >= 0");
    if (!(alpha > 0) || !(alpha < std::min(lambda, theta)))
        throw OutOfDomainError("alpha must lie in (0, min(lambda, theta))");
    return laplace_tau(ServiceCdf::exp_dom(theta, A), lambda, -alpha).value;
}

double delay_bound(double lambda, double theta, double A) {
    return second_moment_tau(ServiceCdf::exp_dom(theta, A), lambda) /
           (2.0 * mean_tau(lambda, 1.0 / theta, A));
}

} // namespace hawkes
