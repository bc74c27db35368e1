#include "hawkes/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hawkes/errors.hpp"

namespace hawkes {

// ---------------------------------------------------------------------------
// PairKernelW
// ---------------------------------------------------------------------------

PairKernelW PairKernelW::constant(double value, double support_len) {
    if (!(support_len >= 0)) throw std::invalid_argument("support length must be >= 0");
    if (!std::isfinite(value)) throw std::invalid_argument("kernel value must be finite");
    PairKernelW w;
    w.is_constant_ = true;
    w.value_ = value;
    w.support_len_ = support_len;
    w.sup_norm_ = std::abs(value);
    return w;
}

PairKernelW PairKernelW::tabulated(std::vector<double> grid, std::vector<double> values) {
    if (grid.size() != values.size() || grid.size() < 2)
        throw std::invalid_argument("tabulated kernel needs matching grids of size >= 2");
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        if (!(grid[i] < grid[i + 1])) throw std::invalid_argument("grid must be ascending");
    if (!(grid.front() < 0) || !(grid.back() <= 0))
        throw std::invalid_argument("grid must lie in [-A', 0]");
    PairKernelW w;
    w.is_constant_ = false;
    w.support_len_ = -grid.front();
    w.sup_norm_ = 0;
    for (double v : values) {
        if (!std::isfinite(v)) throw std::invalid_argument("kernel values must be finite");
        w.sup_norm_ = std::max(w.sup_norm_, std::abs(v));
    }
    w.grid_ = std::move(grid);
    w.values_ = std::move(values);
    return w;
}

double PairKernelW::operator()(double u) const {
    if (u < -support_len_ || u > 0.0) return 0.0;
    if (is_constant_) return value_;
    if (u < grid_.front() || u > grid_.back()) return 0.0;
    const auto it = std::upper_bound(grid_.begin(), grid_.end(), u);
    if (it == grid_.begin()) return values_.front();
    const auto i = static_cast<std::size_t>(it - grid_.begin());
    if (i == grid_.size()) return values_.back();
    const double t = (u - grid_[i - 1]) / (grid_[i] - grid_[i - 1]);
    return values_[i - 1] + t * (values_[i] - values_[i - 1]);
}

// ---------------------------------------------------------------------------
// WindowFunctional
// ---------------------------------------------------------------------------

WindowFunctional WindowFunctional::constant(double value) {
    WindowFunctional f;
    f.kind_ = FunctionalKind::Constant;
    f.value_ = value;
    return f;
}

WindowFunctional WindowFunctional::count() {
    WindowFunctional f;
    f.kind_ = FunctionalKind::Count;
    return f;
}

WindowFunctional WindowFunctional::count_indicator(std::size_t k) {
    WindowFunctional f;
    f.kind_ = FunctionalKind::CountIndicator;
    f.k_ = k;
    return f;
}

WindowFunctional WindowFunctional::pair_kernel(PairKernelW w) {
    WindowFunctional f;
    f.kind_ = FunctionalKind::PairKernel;
    f.w_ = std::make_shared<const PairKernelW>(std::move(w));
    return f;
}

WindowFunctional WindowFunctional::clamped(WindowFunctional inner, double a, double b) {
    if (!(a <= b)) throw std::invalid_argument("clamp range needs a <= b");
    WindowFunctional f;
    f.kind_ = FunctionalKind::Clamped;
    f.inner_ = std::make_shared<const WindowFunctional>(std::move(inner));
    f.lo_ = a;
    f.hi_ = b;
    return f;
}

double WindowFunctional::operator()(std::span<const double> window, double A) const {
    switch (kind_) {
    case FunctionalKind::Constant: return value_;
    case FunctionalKind::Count: return static_cast<double>(window.size());
    case FunctionalKind::CountIndicator: return window.size() == k_ ? 1.0 : 0.0;
    case FunctionalKind::PairKernel: return f_w_functional(window, *w_, A);
    case FunctionalKind::Clamped: return std::clamp((*inner_)(window, A), lo_, hi_);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// Estimators
// ---------------------------------------------------------------------------

double f_w_functional(std::span<const double> mu, const PairKernelW& w, double A) {
    if (!(A > w.support_len()))
        throw SupportViolationError("the window must exceed the pair-kernel support");
    double acc = 0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        for (std::size_t j = i + 1; j-- > 0;) { // y = mu[j] descending from the diagonal
            const double gap = mu[j] - mu[i];
            if (gap < -w.support_len()) break; // w vanishes further out
            acc += w(gap) / (gap + A);
        }
    }
    return acc;
}

namespace {

// exact integral of f over the window sweep on [0, span]: the contents only
// change at {event, event + A}, so sum f times segment length between those.
// Also returns the identically-accumulated measure of [0, span], so that a
// constant f yields a bitwise-equal ratio downstream.
struct SweepResult {
    double integral = 0;
    double measure = 0;
};

SweepResult sweep_windows(const std::vector<double>& ev, double span, const WindowFunctional& f,
                          double A) {
    std::vector<double> bp;
    bp.reserve(2 * ev.size() + 2);
    bp.push_back(0.0);
    for (double e : ev) {
        if (e > 0.0 && e < span) bp.push_back(e);
        if (e + A > 0.0 && e + A < span) bp.push_back(e + A);
    }
    bp.push_back(span);
    std::sort(bp.begin(), bp.end());

    SweepResult out;
    std::size_t lo = 0, hi = 0;
    for (std::size_t j = 0; j + 1 < bp.size(); ++j) {
        const double a = bp[j];
        const double len = bp[j + 1] - a;
        if (!(len > 0)) continue;
        while (hi < ev.size() && ev[hi] <= a) ++hi;
        while (lo < hi && ev[lo] + A <= a) ++lo;
        out.integral += f(std::span<const double>(ev.data() + lo, hi - lo), A) * len;
        out.measure += len;
    }
    return out;
}

} // namespace

double sliding_average(const PathRecord& path, const WindowFunctional& f, double A, double T) {
    if (!(A >= 0)) throw std::invalid_argument("window A must be >= 0");
    if (!(T > 0)) throw std::invalid_argument("T must be positive");
    if (T > path.horizon)
        throw HorizonExceededError("averaging interval [0, T] extends beyond the horizon");
    return sweep_windows(path.times_in(-A, T), T, f, A).integral / T;
}

double pair_statistic(const PathRecord& path, const PairKernelW& w, double A, double T) {
    if (!(A >= 0)) throw std::invalid_argument("window A must be >= 0");
    if (!(T > 0)) throw std::invalid_argument("T must be positive");
    const auto ev = path.times_in(-A, T);
    double acc = 0;
    for (std::size_t i = 0; i < ev.size(); ++i) {
        for (std::size_t j = i + 1; j-- > 0;) {
            const double gap = ev[j] - ev[i];
            if (gap < -w.support_len()) break;
            acc += w(gap);
        }
    }
    return acc / T;
}

double boundary_identity_residual(const PathRecord& path, const PairKernelW& w, double A,
                                  double T) {
    const double lhs =
        pair_statistic(path, w, A, T) - sliding_average(path, WindowFunctional::pair_kernel(w), A, T);
    const auto tail = path.times_in(T - A, T);
    double rhs = 0;
    for (std::size_t i = 0; i < tail.size(); ++i) {
        for (std::size_t j = i + 1; j-- > 0;) {
            const double gap = tail[j] - tail[i];
            if (gap < -w.support_len()) break;
            rhs += (tail[j] - T + A) / (gap + A) * w(gap);
        }
    }
    return lhs - rhs / T;
}

CycleReward cycle_reward(const Cycle& cycle, const WindowFunctional& f, double A) {
    if (!(A >= 0)) throw std::invalid_argument("window A must be >= 0");
    const auto sw = sweep_windows(cycle.times, cycle.length, f, A);
    return {sw.integral, sw.measure};
}

PiEstimate estimate_pi_cycles(const std::vector<Cycle>& cycles, const WindowFunctional& f,
                              double A) {
    if (cycles.size() < 2) throw InsufficientCyclesError(cycles.size());
    if (!(A >= 0)) throw std::invalid_argument("window A must be >= 0");
    const std::size_t n = cycles.size();
    std::vector<double> reward(n), measure(n);
    double sum_r = 0, sum_m = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const auto sw = cycle_reward(cycles[k], f, A);
        reward[k] = sw.reward;
        measure[k] = sw.measure;
        sum_r += sw.reward;
        sum_m += sw.measure;
    }
    const double est = sum_r / sum_m;
    double ss = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double res = reward[k] - est * measure[k];
        ss += res * res;
    }
    const double nd = static_cast<double>(n);
    const double se = std::sqrt(ss / (nd - 1.0)) * std::sqrt(nd) / sum_m;
    return {est, se, n};
}

} // namespace hawkes
