#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "hawkes/errors.hpp"
#include "hawkes/estimators.hpp"
#include "hawkes/regen.hpp"
#include "hawkes/rng.hpp"
#include "hawkes/simulate.hpp"
#include "hawkes/transfer.hpp"

using namespace hawkes;

namespace {

PathRecord singleton_path(double t, double horizon) {
    PathRecord p;
    p.lambda = 1.0;
    p.horizon = horizon;
    p.ancestors.push_back({t, {{0.0}, {-1}, {0}}});
    p.rebuild_events();
    return p;
}

PathRecord standard_path(double horizon, unsigned stream) {
    auto h = TransferFunction::exponential(0.5, 1.0);
    auto rng = make_stream(661406, stream);
    return simulate_path(1.0, h, {}, horizon, rng);
}

} // namespace

TEST_SUITE("estimators") {

TEST_CASE("pair kernels: support, interpolation, sup norm") {
    auto w = PairKernelW::constant(2.5, 1.0);
    CHECK(w(0.0) == 2.5);
    CHECK(w(-1.0) == 2.5);
    CHECK(w(-1.0000001) == 0.0);
    CHECK(w(0.1) == 0.0);
    CHECK(w.sup_norm() == 2.5);
    CHECK(w.support_len() == 1.0);

    auto wt = PairKernelW::tabulated({-1.0, -0.5, 0.0}, {0.0, 2.0, 1.0});
    CHECK(wt.support_len() == 1.0);
    CHECK(wt.sup_norm() == 2.0);
    CHECK(wt(-0.75) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(wt(-0.5) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(wt(-0.25) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(wt(0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(wt(-2.0) == 0.0);

    // a table stopping short of 0 leaves the gap (and the diagonal) at zero
    auto ws = PairKernelW::tabulated({-1.0, -0.5}, {1.0, 1.0});
    CHECK(ws(-0.25) == 0.0);
    CHECK(ws(0.0) == 0.0);
    CHECK(ws(-0.7) == 1.0);

    CHECK_THROWS_AS(PairKernelW::tabulated({0.0, -1.0}, {1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(PairKernelW::tabulated({-1.0, 0.5}, {1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(PairKernelW::tabulated({-1.0}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(PairKernelW::constant(1.0, -0.5), std::invalid_argument);
}

TEST_CASE("window functionals evaluate on window contents") {
    const std::vector<double> win{-0.5, 0.0};
    const std::vector<double> empty;

    CHECK(WindowFunctional::constant(3.0)(win, 2.0) == 3.0);
    CHECK(WindowFunctional::count()(win, 2.0) == 2.0);
    CHECK(WindowFunctional::count()(empty, 2.0) == 0.0);
    CHECK(WindowFunctional::count_indicator(2)(win, 2.0) == 1.0);
    CHECK(WindowFunctional::count_indicator(1)(win, 2.0) == 0.0);
    CHECK(WindowFunctional::count_indicator(0)(empty, 2.0) == 1.0);

    auto clamped = WindowFunctional::clamped(WindowFunctional::count(), 0.5, 1.5);
    CHECK(clamped(win, 2.0) == 1.5);
    CHECK(clamped(empty, 2.0) == 0.5);
    CHECK_THROWS_AS(WindowFunctional::clamped(WindowFunctional::count(), 2.0, 1.0),
                    std::invalid_argument);

    auto fw = WindowFunctional::pair_kernel(PairKernelW::constant(1.0, 1.0));
    CHECK(fw(win, 2.0) == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("f_w enumerates ordered pairs with the diagonal") {
    auto w = PairKernelW::constant(1.0, 1.0);
    const std::vector<double> mu{-0.5, 0.0};
    CHECK(f_w_functional(mu, w, 2.0) == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
    CHECK(f_w_functional({}, w, 2.0) == 0.0);
    CHECK(f_w_functional(mu, PairKernelW::constant(0.0, 1.0), 2.0) == 0.0);

    // window at most the support: the denominator control A - A' degenerates
    CHECK_THROWS_AS(f_w_functional(mu, w, 1.0), SupportViolationError);
    CHECK_THROWS_AS(f_w_functional(mu, w, 0.5), SupportViolationError);

    // linear ramp w(u) = u + 1: diagonals 2 * w(0)/A, cross w(-0.3)/1.7
    auto ramp = PairKernelW::tabulated({-1.0, 0.0}, {0.0, 1.0});
    const std::vector<double> mu2{-0.3, 0.0};
    CHECK(f_w_functional(mu2, ramp, 2.0) == doctest::Approx(24.0 / 17.0).epsilon(1e-14));

    // gaps wider than the support do not contribute
    const std::vector<double> far{-1.8, 0.0};
    CHECK(f_w_functional(far, w, 2.5) == doctest::Approx(2.0 * 1.0 / 2.5).epsilon(1e-14));
}

TEST_CASE("sliding average: exact event-driven integration") {
    const auto p = singleton_path(0.5, 20.0);
    CHECK(sliding_average(p, WindowFunctional::count(), 1.0, 2.0) == 0.5);
    CHECK(sliding_average(p, WindowFunctional::constant(1.0), 1.0, 2.0) ==
          doctest::Approx(1.0).epsilon(1e-15));
    // width-zero windows never contain anything
    CHECK(sliding_average(p, WindowFunctional::count(), 0.0, 2.0) == 0.0);

    PathRecord empty;
    empty.horizon = 5.0;
    CHECK(sliding_average(empty, WindowFunctional::count(), 1.0, 5.0) == 0.0);

    // the initial condition is visible to windows with t < A
    PathRecord withinit;
    withinit.lambda = 1.0;
    withinit.horizon = 20.0;
    withinit.init_points = {-0.25};
    withinit.rebuild_events();
    CHECK(sliding_average(withinit, WindowFunctional::count(), 1.0, 2.0) ==
          doctest::Approx(0.375).epsilon(1e-15));

    // window crossing the endpoint T is truncated at T
    CHECK(sliding_average(singleton_path(1.8, 20.0), WindowFunctional::count(), 1.0, 2.0) ==
          doctest::Approx(0.1).epsilon(1e-13));

    CHECK_THROWS_AS(sliding_average(p, WindowFunctional::count(), 1.0, 21.0),
                    HorizonExceededError);
    CHECK_THROWS_AS(sliding_average(p, WindowFunctional::count(), 1.0, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(sliding_average(p, WindowFunctional::count(), -1.0, 2.0),
                    std::invalid_argument);
}

TEST_CASE("pair statistic: ordered pairs up to T") {
    auto w = PairKernelW::constant(1.0, 1.0);
    CHECK(pair_statistic(singleton_path(0.5, 20.0), w, 2.0, 1.0) == 1.0);

    PathRecord two;
    two.lambda = 1.0;
    two.horizon = 20.0;
    two.ancestors.push_back({0.5, {{0.0}, {-1}, {0}}});
    two.ancestors.push_back({1.0, {{0.0}, {-1}, {0}}});
    two.rebuild_events();
    CHECK(pair_statistic(two, w, 2.0, 2.0) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(pair_statistic(two, PairKernelW::constant(0.0, 1.0), 2.0, 2.0) == 0.0);

    // events past T are outside the pair domain
    CHECK(pair_statistic(two, w, 2.0, 0.75) == doctest::Approx(1.0 / 0.75).epsilon(1e-15));

    // events at or before -A are outside as well
    PathRecord deep;
    deep.lambda = 1.0;
    deep.horizon = 20.0;
    deep.init_points = {-1.5};
    deep.rebuild_events();
    CHECK(pair_statistic(deep, w, 1.0, 1.0) == 0.0);
    CHECK(pair_statistic(deep, w, 2.0, 1.0) == 1.0); // now inside, diagonal only
}

TEST_CASE("boundary identity holds exactly") {
    auto w = PairKernelW::constant(1.0, 0.3);
    // empty path
    PathRecord empty;
    empty.horizon = 5.0;
    CHECK(boundary_identity_residual(empty, w, 0.5, 5.0) == 0.0);

    // single event in the interior, then in the boundary strip
    CHECK(std::abs(boundary_identity_residual(singleton_path(0.2, 5.0), w, 0.5, 1.0)) < 1e-15);
    CHECK(std::abs(boundary_identity_residual(singleton_path(0.9, 5.0), w, 0.5, 1.0)) < 1e-15);

    // sweep over simulated paths
    auto ww = PairKernelW::constant(1.0, 1.0);
    double worst = 0;
    for (unsigned k = 0; k < 100; ++k) {
        const auto p = standard_path(50.0, 100 + k);
        const double lhs_scale =
            1.0 + std::abs(pair_statistic(p, ww, 2.0, 50.0) -
                           sliding_average(p, WindowFunctional::pair_kernel(ww), 2.0, 50.0));
        const double res = boundary_identity_residual(p, ww, 2.0, 50.0);
        CHECK(std::abs(res) < 1e-10 * lhs_scale);
        worst = std::max(worst, std::abs(res));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("sandwich inequality for nonnegative weights") {
    auto fw = [](const PairKernelW& w) { return WindowFunctional::pair_kernel(w); };
    const double T = 50.0, A = 2.0;
    for (unsigned k = 0; k < 5; ++k) {
        const auto p = standard_path(T + A, 300 + k);
        for (const auto& w : {PairKernelW::constant(1.0, 1.0),
                              PairKernelW::tabulated({-1.0, -0.4, 0.0}, {0.0, 1.5, 0.5})}) {
            const double lower = sliding_average(p, fw(w), A, T);
            const double mid = pair_statistic(p, w, A, T);
            const double upper = sliding_average(p, fw(w), A, T + A) * (T + A) / T;
            CHECK(lower <= mid + 1e-12);
            CHECK(mid <= upper + 1e-12);
        }
    }
}

TEST_CASE("window locality: far events never matter") {
    const double A = 1.0, T = 10.0;
    auto p = standard_path(40.0, 7);
    const double base = sliding_average(p, WindowFunctional::count(), A, T);

    // inject an event beyond T + A and an initial point at or before -A
    auto far = p;
    far.ancestors.push_back({T + A + 0.5, {{0.0}, {-1}, {0}}});
    far.rebuild_events();
    CHECK(sliding_average(far, WindowFunctional::count(), A, T) == base);

    auto early = p;
    early.init_points = {-A};
    early.rebuild_events();
    CHECK(sliding_average(early, WindowFunctional::count(), A, T) == base);

    // whereas a point strictly inside (-A, 0] does matter
    auto inside = p;
    inside.init_points = {-A + 0.125};
    inside.rebuild_events();
    CHECK(sliding_average(inside, WindowFunctional::count(), A, T) != base);
}

TEST_CASE("cycle estimator: exact cases and the ratio form") {
    // constant reward integrates to the cycle length: ratio is exactly 1
    const auto p = standard_path(300.0, 11);
    const auto rep = regeneration_times(p, 1.0);
    const auto dec = extract_cycles(p, rep);
    REQUIRE(dec.cycles.size() >= 2);
    const auto one = estimate_pi_cycles(dec.cycles, WindowFunctional::constant(1.0), 1.0);
    CHECK(one.estimate == 1.0);
    CHECK(one.std_error == 0.0);
    CHECK(one.n_cycles == dec.cycles.size());

    // zero-width windows
    auto hz = TransferFunction::zero();
    auto rng = make_stream(661406, 40);
    const auto pz = simulate_path(1.0, hz, {}, 200.0, rng);
    const auto dz = extract_cycles(pz, regeneration_times(pz, 0.0));
    const auto zero = estimate_pi_cycles(dz.cycles, WindowFunctional::count(), 0.0);
    CHECK(zero.estimate == 0.0);
    CHECK(zero.std_error == 0.0);

    // hand-built cycles, including a visible head point
    std::vector<Cycle> cycles;
    cycles.push_back({2.0, {1.0}});
    cycles.push_back({2.0, {0.5}});
    const auto est = estimate_pi_cycles(cycles, WindowFunctional::count(), 1.0);
    CHECK(est.estimate == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(est.std_error == doctest::Approx(0.0).epsilon(1e-15));

    std::vector<Cycle> head;
    head.push_back({2.0, {-0.5}}); // visible on [0, 0.5)
    head.push_back({2.0, {}});
    const auto he = estimate_pi_cycles(head, WindowFunctional::count(), 1.0);
    CHECK(he.estimate == doctest::Approx(0.125).epsilon(1e-15));

    CHECK_THROWS_AS(estimate_pi_cycles({dec.cycles[0]}, WindowFunctional::count(), 1.0),
                    InsufficientCyclesError);
}

TEST_CASE("time average and cycle average estimate the same limit") {
    const double A = 1.0, T = 5000.0;
    auto f = WindowFunctional::count();

    const auto p1 = standard_path(T, 51);
    const double direct = sliding_average(p1, f, A, T);
    // batch means over 50 increments of the running integral
    const int nb = 50;
    std::vector<double> batch(nb);
    double prev = 0;
    for (int k = 1; k <= nb; ++k) {
        const double tk = T * k / nb;
        const double cum = sliding_average(p1, f, A, tk) * tk;
        batch[k - 1] = (cum - prev) / (T / nb);
        prev = cum;
    }
    double bm = 0, bs = 0;
    for (double b : batch) bm += b / nb;
    for (double b : batch) bs += (b - bm) * (b - bm);
    const double se_direct = std::sqrt(bs / (nb - 1.0) / nb);

    const auto p2 = standard_path(T, 52);
    const auto dec = extract_cycles(p2, regeneration_times(p2, A));
    REQUIRE(dec.cycles.size() >= 100);
    const auto cyc = estimate_pi_cycles(dec.cycles, f, A);

    const double joint = std::sqrt(se_direct * se_direct + cyc.std_error * cyc.std_error);
    CHECK(std::abs(direct - cyc.estimate) <= 3.0 * joint);
    // the stationary mean count over a unit window is rate/(1 - l1) = 2
    CHECK(std::abs(cyc.estimate - 2.0) <= 5.0 * joint);
}

} // TEST_SUITE
