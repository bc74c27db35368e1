#include "hawkes/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "hawkes/errors.hpp"

namespace hawkes {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// exact integrals of a linear piece v(x) = v0 + m x over [0, d]
double seg_l1(double v0, double v1, double d) { return 0.5 * (v0 + v1) * d; }

// integral of (t0 + x) * v(x) dx over [0, d]
double seg_mean(double t0, double v0, double v1, double d) {
    const double m = (v1 - v0) / d;
    return t0 * seg_l1(v0, v1, d) + v0 * d * d / 2.0 + m * d * d * d / 3.0;
}

// integral of e^{theta (t0+x)} v(x) dx over [0, d]
double seg_exp(double theta, double t0, double v0, double v1, double d) {
    const double m = (v1 - v0) / d;
    const double u = theta * d;
    double i0, i1; // int e^{theta x} dx, int x e^{theta x} dx over [0,d]
    if (std::fabs(u) < 1e-6) {
        i0 = d * (1.0 + u / 2.0 + u * u / 6.0 + u * u * u / 24.0);
        i1 = d * d * (0.5 + u / 3.0 + u * u / 8.0 + u * u * u / 30.0);
    } else {
        const double e = std::expm1(u);
        i0 = e / theta;
        i1 = (d * (e + 1.0) - i0) / theta;
    }
    return std::exp(theta * t0) * (v0 * i0 + m * i1);
}

} // namespace

TransferFunction TransferFunction::zero() { return TransferFunction{}; }

TransferFunction TransferFunction::exponential(double alpha, double beta) {
    if (alpha < 0.0 || beta <= 0.0)
        throw std::invalid_argument("exponential kernel needs alpha >= 0, beta > 0");
    TransferFunction h;
    h.kind_ = alpha == 0.0 ? KernelKind::Zero : KernelKind::Exponential;
    h.alpha_ = alpha;
    h.beta_ = beta;
    return h;
}

TransferFunction TransferFunction::uniform_box(double c, double b) {
    if (c < 0.0 || b <= 0.0)
        throw std::invalid_argument("box kernel needs c >= 0, b > 0");
    TransferFunction h;
    h.kind_ = c == 0.0 ? KernelKind::Zero : KernelKind::UniformBox;
    h.c_ = c;
    h.b_ = b;
    return h;
}

TransferFunction TransferFunction::tabulated(std::vector<double> grid,
                                             std::vector<double> values) {
    if (grid.size() != values.size() || grid.size() < 2)
        throw std::invalid_argument("tabulated kernel needs >= 2 grid points");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (i + 1 < grid.size() && !(grid[i + 1] > grid[i]))
            throw std::invalid_argument("tabulated kernel grid must be strictly increasing");
        if (!(values[i] >= 0.0) || grid[i] < 0.0)
            throw std::invalid_argument("tabulated kernel needs t >= 0 and values >= 0");
    }
    TransferFunction h;
    h.kind_ = KernelKind::Tabulated;
    h.grid_ = std::move(grid);
    h.values_ = std::move(values);
    h.cum_.assign(h.grid_.size(), 0.0);
    for (std::size_t i = 1; i < h.grid_.size(); ++i)
        h.cum_[i] = h.cum_[i - 1] + seg_l1(h.values_[i - 1], h.values_[i],
                                           h.grid_[i] - h.grid_[i - 1]);
    if (h.cum_.back() == 0.0) h.kind_ = KernelKind::Zero;
    return h;
}

TransferFunction TransferFunction::tabulated_from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open kernel grid file: " + path);
    std::vector<double> t, v;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        for (char& ch : line)
            if (ch == ',' || ch == ';' || ch == '\t') ch = ' ';
        std::istringstream ls(line);
        double a, b;
        if (ls >> a >> b) {
            t.push_back(a);
            v.push_back(b);
        } else if (!t.empty()) {
            throw std::invalid_argument("malformed kernel grid line: " + line);
        } // else header line, skip
    }
    return tabulated(std::move(t), std::move(v));
}

double TransferFunction::operator()(double t) const {
    switch (kind_) {
        case KernelKind::Zero: return 0.0;
        case KernelKind::Exponential: return t > 0.0 ? alpha_ * std::exp(-beta_ * t) : 0.0;
        case KernelKind::UniformBox: return (t > 0.0 && t <= b_) ? c_ : 0.0;
        case KernelKind::Tabulated: {
            if (t < grid_.front() || t > grid_.back()) return 0.0;
            auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
            std::size_t i = (it == grid_.begin()) ? 1 : (it - grid_.begin());
            if (i >= grid_.size()) i = grid_.size() - 1;
            const double t0 = grid_[i - 1], t1 = grid_[i];
            const double w = (t - t0) / (t1 - t0);
            return values_[i - 1] * (1.0 - w) + values_[i] * w;
        }
    }
    return 0.0;
}

double TransferFunction::l1_norm() const {
    switch (kind_) {
        case KernelKind::Zero: return 0.0;
        case KernelKind::Exponential: return alpha_ / beta_;
        case KernelKind::UniformBox: return c_ * b_;
        case KernelKind::Tabulated: return cum_.back();
    }
    return 0.0;
}

double TransferFunction::mean_moment() const {
    switch (kind_) {
        case KernelKind::Zero: return 0.0;
        case KernelKind::Exponential: return alpha_ / (beta_ * beta_);
        case KernelKind::UniformBox: return c_ * b_ * b_ / 2.0;
        case KernelKind::Tabulated: {
            double s = 0.0;
            for (std::size_t i = 1; i < grid_.size(); ++i)
                s += seg_mean(grid_[i - 1], values_[i - 1], values_[i],
                              grid_[i] - grid_[i - 1]);
            return s;
        }
    }
    return 0.0;
}

double TransferFunction::exp_moment(double theta) const {
    switch (kind_) {
        case KernelKind::Zero: return 0.0;
        case KernelKind::Exponential:
            return theta < beta_ ? alpha_ / (beta_ - theta) : kInf;
        case KernelKind::UniformBox:
            if (theta == 0.0) return c_ * b_;
            return c_ * std::expm1(theta * b_) / theta;
        case KernelKind::Tabulated: {
            double s = 0.0;
            for (std::size_t i = 1; i < grid_.size(); ++i)
                s += seg_exp(theta, grid_[i - 1], values_[i - 1], values_[i],
                             grid_[i] - grid_[i - 1]);
            return s;
        }
    }
    return 0.0;
}

double TransferFunction::integral_to(double x) const {
    if (x <= 0.0) return 0.0;
    switch (kind_) {
        case KernelKind::Zero: return 0.0;
        case KernelKind::Exponential:
            return alpha_ / beta_ * -std::expm1(-beta_ * x);
        case KernelKind::UniformBox: return c_ * std::min(x, b_);
        case KernelKind::Tabulated: {
            if (x <= grid_.front()) return 0.0;
            if (x >= grid_.back()) return cum_.back();
            auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
            const std::size_t i = it - grid_.begin(); // x in [grid_[i-1], grid_[i])
            const double t0 = grid_[i - 1], d = grid_[i] - t0;
            const double m = (values_[i] - values_[i - 1]) / d;
            const double u = x - t0;
            return cum_[i - 1] + values_[i - 1] * u + 0.5 * m * u * u;
        }
    }
    return 0.0;
}

double TransferFunction::tail_mass(double depth) const {
    return std::max(0.0, l1_norm() - integral_to(depth));
}

double TransferFunction::theta_star(double tol) const {
    const double l1 = l1_norm();
    if (l1 >= 1.0) throw NotSubcriticalError(l1);
    if (kind_ == KernelKind::Zero) return kInf;

    // bracket: exp_moment is increasing in theta; double until it crosses 1
    double lo = 0.0;
    double hi = std::max(tol, 1e-6);
    const double cap = kind_ == KernelKind::Exponential ? beta_ : kInf;
    while (exp_moment(std::min(hi, cap)) < 1.0) {
        if (hi >= cap) return cap; // mass jumps to +inf at beta without reaching 1
        lo = hi;
        hi *= 2.0;
        if (hi > 1e12) return kInf;
    }
    hi = std::min(hi, cap);
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (exp_moment(mid) <= 1.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double TransferFunction::sample_delay(Rng& rng) const {
    if (kind_ == KernelKind::Zero || l1_norm() == 0.0) throw ZeroKernelError{};
    return sample_tail_delay(0.0, rng);
}

double TransferFunction::sample_tail_delay(double depth, Rng& rng) const {
    const double mass = tail_mass(depth);
    if (mass <= 0.0) throw ZeroKernelError{};
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    switch (kind_) {
        case KernelKind::Zero: throw ZeroKernelError{};
        case KernelKind::Exponential: {
            // memoryless tail: depth + Exp(beta)
            std::exponential_distribution<double> exp(beta_);
            return std::max(depth, 0.0) + exp(rng);
        }
        case KernelKind::UniformBox: {
            const double lo = std::max(depth, 0.0);
            return lo + (b_ - lo) * (1.0 - unif(rng)); // in (lo, b]
        }
        case KernelKind::Tabulated: {
            const double base = integral_to(std::max(depth, 0.0));
            const double target = base + unif(rng) * mass;
            // locate segment containing the target cumulative mass
            auto it = std::upper_bound(cum_.begin(), cum_.end(), target);
            std::size_t i = (it == cum_.begin()) ? 1 : (it - cum_.begin());
            if (i >= cum_.size()) i = cum_.size() - 1;
            const double t0 = grid_[i - 1], d = grid_[i] - t0;
            const double v0 = values_[i - 1];
            const double m = (values_[i] - v0) / d;
            const double rem = target - cum_[i - 1]; // v0 u + m u^2 / 2 = rem
            double u = 0.0;
            if (rem > 0.0) {
                // stable root of the piecewise-quadratic CDF, any sign of m
                const double disc = std::max(v0 * v0 + 2.0 * m * rem, 0.0);
                u = 2.0 * rem / (v0 + std::sqrt(disc));
            }
            return t0 + std::clamp(u, 0.0, d);
        }
    }
    throw ZeroKernelError{};
}

std::vector<double> truncated_offspring(const TransferFunction& h, double depth, Rng& rng) {
    const double mass = h.tail_mass(depth);
    std::vector<double> births;
    if (mass <= 0.0) return births;
    std::poisson_distribution<int> pois(mass);
    const int n = pois(rng);
    births.reserve(n);
    for (int i = 0; i < n; ++i) births.push_back(h.sample_tail_delay(depth, rng) - depth);
    std::sort(births.begin(), births.end());
    return births;
}

} // namespace hawkes
