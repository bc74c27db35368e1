#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

namespace hawkes::num {

// ---------------------------------------------------------------------------
// Adaptive Gauss-Kronrod 7/15 quadrature.
//
// Works for real and complex integrands; the error estimate per panel is the
// magnitude of the difference between the 15-point Kronrod and the embedded
// 7-point Gauss rule. Panels are bisected worst-first until the summed error
// estimate meets max(abs_tol, rel_tol * |I|).
// ---------------------------------------------------------------------------

namespace detail {

// nodes on [0,1] by symmetry; last Kronrod node is 0
inline constexpr double kronrod_x[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0};
inline constexpr double kronrod_w[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
inline constexpr double gauss_w[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <class F>
auto gk15(F&& f, double a, double b, double& err) {
    using S = decltype(f(0.0));
    const double h = 0.5 * (b - a);
    const double c = 0.5 * (a + b);
    S kron{};
    S gauss{};
    for (int i = 0; i < 8; ++i) {
        const double dx = h * kronrod_x[i];
        S v = (i == 7) ? f(c) : f(c - dx) + f(c + dx);
        kron += kronrod_w[i] * v;
        if (i % 2 == 1) gauss += gauss_w[i / 2] * v;
    }
    kron *= h;
    gauss *= h;
    err = std::abs(kron - gauss);
    return kron;
}

} // namespace detail

template <class S>
struct QuadResult {
    S value{};
    double abs_error = 0.0;
    std::size_t panels = 0;
};

template <class F>
auto integrate(F&& f, double a, double b, double rel_tol = 1e-12, double abs_tol = 0.0,
               std::size_t max_panels = 4000) {
    using S = decltype(f(0.0));
    struct Panel {
        double a, b, err;
        S val;
    };
    std::vector<Panel> panels;
    double e0;
    S v0 = detail::gk15(f, a, b, e0);
    panels.push_back({a, b, e0, v0});

    auto total = [&] {
        S v{};
        double e = 0;
        for (const auto& p : panels) {
            v += p.val;
            e += p.err;
        }
        return std::pair<S, double>{v, e};
    };

    while (panels.size() < max_panels) {
        auto [v, e] = total();
        if (e <= std::max(abs_tol, rel_tol * std::abs(v))) break;
        std::size_t worst = 0;
        for (std::size_t i = 1; i < panels.size(); ++i)
            if (panels[i].err > panels[worst].err) worst = i;
        Panel p = panels[worst];
        if (p.b - p.a < 1e-14 * (b - a)) break; // panel exhausted, accept estimate
        const double m = 0.5 * (p.a + p.b);
        double e1, e2;
        S v1 = detail::gk15(f, p.a, m, e1);
        S v2 = detail::gk15(f, m, p.b, e2);
        panels[worst] = {p.a, m, e1, v1};
        panels.push_back({m, p.b, e2, v2});
    }
    auto [v, e] = total();
    return QuadResult<S>{v, e, panels.size()};
}

// Convenience: integrate over consecutive breakpoints (kinks of the integrand).
template <class F>
auto integrate_segments(F&& f, const std::vector<double>& pts, double rel_tol = 1e-12,
                        double abs_tol = 0.0) {
    using S = decltype(f(0.0));
    QuadResult<S> out;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        if (!(pts[i + 1] > pts[i])) continue;
        auto r = integrate(f, pts[i], pts[i + 1], rel_tol, abs_tol);
        out.value += r.value;
        out.abs_error += r.abs_error;
        out.panels += r.panels;
    }
    return out;
}

// ---------------------------------------------------------------------------
// (1 - e^{-x*t}) / x with the x -> 0 limit t. Used all over the transform code.
// ---------------------------------------------------------------------------
inline double one_minus_exp_over(double x, double t) {
    if (x == 0.0) return t;
    return -std::expm1(-x * t) / x;
}

// complex overload; series below |x t| = 1e-4 keeps full precision at the pole
inline std::complex<double> one_minus_exp_over(std::complex<double> x, double t) {
    const std::complex<double> xt = x * t;
    if (std::abs(xt) < 1e-4) {
        return t * (1.0 - xt * (0.5 - xt * (1.0 / 6.0 - xt / 24.0)));
    }
    return (1.0 - std::exp(-xt)) / x;
}

// ---------------------------------------------------------------------------
// Regularized lower incomplete gamma P(a, x); series for x < a+1, continued
// fraction otherwise. Classic construction, ~1e-14 accuracy for moderate a.
// ---------------------------------------------------------------------------
double regularized_gamma_p(double a, double x);

// Survival function of the chi-square with k degrees of freedom.
inline double chi_square_sf(double x, double k) {
    return 1.0 - regularized_gamma_p(0.5 * k, 0.5 * x);
}

// Kolmogorov distribution survival function Q(x) = 2 sum (-1)^{k-1} e^{-2 k^2 x^2}.
inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x * 0.7071067811865475244);
}

double kolmogorov_sf(double x);

// One-sample KS p-value for n observations with statistic d = sup|F_n - F|.
inline double ks_p_value(double d, std::size_t n) {
    const double rn = std::sqrt(static_cast<double>(n));
    return kolmogorov_sf(d * (rn + 0.12 + 0.11 / rn));
}

// Two-sample KS p-value (asymptotic), n and m sample sizes.
inline double ks2_p_value(double d, std::size_t n, std::size_t m) {
    const double ne = static_cast<double>(n) * static_cast<double>(m) /
                      static_cast<double>(n + m);
    const double rn = std::sqrt(ne);
    return kolmogorov_sf(d * (rn + 0.12 + 0.11 / rn));
}

} // namespace hawkes::num
