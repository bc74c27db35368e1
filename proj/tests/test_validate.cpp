#include "doctest.h"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "json.hpp"

#include "hawkes/errors.hpp"
#include "hawkes/numeric.hpp"
#include "hawkes/regen.hpp"
#include "hawkes/rng.hpp"
#include "hawkes/simulate.hpp"
#include "hawkes/validate.hpp"

using namespace hawkes;

namespace {

double exp1_ks_p(const std::vector<double>& xs) {
    std::vector<double> s = xs;
    std::sort(s.begin(), s.end());
    const double n = static_cast<double>(s.size());
    double d = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double c = 1.0 - std::exp(-s[i]);
        d = std::max(d, std::max(c - static_cast<double>(i) / n,
                                 static_cast<double>(i + 1) / n - c));
    }
    return num::ks_p_value(d, s.size());
}

} // namespace

TEST_SUITE("validate") {

TEST_CASE("empty kernel cycles against closed forms") {
    const auto rep = mc_regen_moments(1.0, TransferFunction::zero(), 1.0, 2000, 91201);
    CHECK(rep.kind == "regen_moments");
    CHECK(rep.n == 2000);
    CHECK(rep.seed == 91201);
    CHECK(rep.cycle_lengths.size() == 2000);
    CHECK(rep.grid.size() == 4);
    CHECK(rep.all_pass());

    // Clusters of the empty kernel are single points, so the two-stage
    // formulas collapse to the exact degenerate-service values.
    for (const auto& v : rep.verdicts) {
        CHECK(v.rule == "|mc - formula| <= 3 sqrt(se_mc^2 + se_formula^2)");
    }
    CHECK(std::abs(rep.mean - std::exp(1.0)) <= 3.0 * rep.mean_se);
    CHECK(rep.grid[2].x == 1.0);
    CHECK(rep.grid[2].formula == doctest::Approx(0.119202922022117556).epsilon(1e-14));

    // Window zero: cycles are bare exponential gaps.
    const auto rep0 = mc_regen_moments(1.0, TransferFunction::zero(), 0.0, 2000, 91202);
    CHECK(rep0.all_pass());
    CHECK(exp1_ks_p(rep0.cycle_lengths) >= 0.01);

    CHECK_THROWS_AS((void)mc_regen_moments(1.0, TransferFunction::zero(), 1.0, 50, 1),
                    InsufficientCyclesError);
    CHECK_THROWS_AS((void)mc_regen_moments(0.0, TransferFunction::zero(), 1.0, 500, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        (void)mc_regen_moments(1.0, TransferFunction::zero(), 1.0, 500, 1, {0.5, -1.0}),
        std::invalid_argument);
}

TEST_CASE("exponential-service queue cycles against closed forms") {
    const auto F = ServiceCdf::exp_dom(1.0, 0.0);
    const auto rep = mc_queue_moments(F, 1.0, 20000, 424242, {0.5, 1.0});
    CHECK(rep.kind == "queue_moments");
    CHECK(rep.all_pass());
    CHECK(rep.grid.size() == 2);
    CHECK(rep.grid[0].formula == doctest::Approx(0.38051286278149936).epsilon(1e-13));
    CHECK(rep.grid[1].formula == doctest::Approx(0.209011646565336788).epsilon(1e-13));
    CHECK(std::abs(rep.mean - std::exp(1.0)) <= 3.0 * rep.mean_se);
    CHECK(std::abs(rep.second_moment - 12.6014225968892636) <=
          3.0 * rep.second_moment_se);

    // Same seed reproduces bit-identically; doubling n shrinks the SE by
    // about sqrt(2).
    const auto again = mc_queue_moments(F, 1.0, 20000, 424242, {0.5, 1.0});
    CHECK(again.mean == rep.mean);
    CHECK(again.grid[1].empirical == rep.grid[1].empirical);
    const auto half = mc_queue_moments(F, 1.0, 10000, 424242, {0.5, 1.0});
    const double ratio = half.mean_se / rep.mean_se;
    CHECK(ratio > std::sqrt(2.0) * 0.8);
    CHECK(ratio < std::sqrt(2.0) * 1.2);

    // Degenerate service, zero window: cycles are exponential gaps.
    const auto deg = mc_queue_moments(ServiceCdf::degenerate(0.0), 2.0, 2000, 77);
    CHECK(deg.all_pass());
    CHECK(deg.mean == doctest::Approx(0.5).epsilon(0.05));

    // Empirical service law resamples the recorded lengths.
    const std::vector<double> lens = {0.0, 1.0};
    const auto emp = mc_queue_moments(ServiceCdf::empirical(lens, 0.5), 1.0, 5000, 99123);
    CHECK(emp.all_pass());
}

TEST_CASE("two-stage agreement for a general kernel") {
    const auto h = TransferFunction::exponential(0.5, 1.0);
    const auto rep = mc_regen_moments(1.0, h, 0.0, 4000, 515151);
    CHECK(rep.all_pass());
    CHECK(rep.mean == doctest::Approx(std::exp(0.8)).epsilon(0.08));
    for (const auto& g : rep.grid) {
        CHECK(g.empirical > 0.0);
        CHECK(g.empirical < 1.0);
        CHECK(g.se > 0.0);
    }
}

TEST_CASE("cluster tail domination") {
    const auto h = TransferFunction::exponential(0.5, 1.0);
    const auto rep = domination_report(h, {0.25, 0.5}, 20000, 616161);
    CHECK(rep.kind == "domination");
    CHECK(rep.grid.size() == 8);
    CHECK(rep.all_pass());
    for (const auto& g : rep.grid) {
        CHECK(g.formula == doctest::Approx(std::exp(-g.tag * g.x)).epsilon(1e-15));
        CHECK(g.loose == doctest::Approx(std::exp(0.5) * g.formula).epsilon(1e-15));
        CHECK(g.empirical <= g.formula + 3.0 * g.se);
    }
    // Mean cluster size 1/(1 - 1/2) = 2 sits behind the first verdict.
    CHECK(rep.verdicts[0].name == "mean cluster size");
    CHECK(std::abs(rep.mean - 2.0) <= rep.verdicts[0].limit);

    const auto zero = domination_report(TransferFunction::zero(), {1.0}, 500, 3);
    CHECK(zero.all_pass());
    CHECK(zero.mean == 1.0);
    for (const auto& g : zero.grid) CHECK(g.empirical == 0.0);

    CHECK_THROWS_AS((void)domination_report(h, {0.6}, 500, 1), OutOfDomainError);
    CHECK_THROWS_AS((void)domination_report(h, {0.0}, 500, 1), std::invalid_argument);
    CHECK_THROWS_AS((void)domination_report(h, {0.5}, 50, 1), InsufficientCyclesError);
}

TEST_CASE("clt variance plug-in") {
    const auto h = TransferFunction::exponential(0.5, 1.0);
    auto rng = make_stream(717171, 0);
    const auto path = simulate_path(1.0, h, {}, 2000.0, rng);
    const auto rep = regeneration_times(path, 1.0);
    const auto dec = extract_cycles(path, rep);
    REQUIRE(dec.cycles.size() >= 100);

    // Constant functional equal to its own stationary mean: centered rewards
    // cancel to roundoff.
    const auto flat = WindowFunctional::constant(3.14159);
    const auto s2_flat = clt_sigma2(dec.cycles, flat, 1.0, 3.14159);
    CHECK(s2_flat.sigma2 >= 0.0);
    CHECK(s2_flat.sigma2 <= 1e-18);

    // Count with a zero-width window never sees a point: exact zero.
    auto rng0 = make_stream(717172, 0);
    const auto p0 = simulate_path(1.0, TransferFunction::zero(), {}, 500.0, rng0);
    const auto rep0 = regeneration_times(p0, 0.0);
    const auto dec0 = extract_cycles(p0, rep0);
    REQUIRE(dec0.cycles.size() >= 100);
    const auto count = WindowFunctional::count();
    const auto pi0 = estimate_pi_cycles(dec0.cycles, count, 0.0);
    CHECK(pi0.estimate == 0.0);
    const auto s2_0 = clt_sigma2(dec0.cycles, count, 0.0, pi0.estimate);
    CHECK(s2_0.sigma2 == 0.0);
    CHECK(s2_0.se == 0.0);

    const std::vector<Cycle> few(50, Cycle{1.0, {}});
    CHECK_THROWS_AS((void)clt_sigma2(few, count, 0.0, 0.0), InsufficientCyclesError);

    // Normalized path averages pass a normality check with the plug-in
    // centering and scale.
    auto ref_rng = make_stream(717173, 0);
    const auto ref = simulate_path(1.0, h, {}, 48000.0, ref_rng);
    const auto ref_rep = regeneration_times(ref, 1.0);
    const auto ref_dec = extract_cycles(ref, ref_rep);
    const auto pi = estimate_pi_cycles(ref_dec.cycles, count, 1.0);
    const auto s2 = clt_sigma2(ref_dec.cycles, count, 1.0, pi.estimate);
    CHECK(s2.sigma2 > 0.0);
    CHECK(s2.se < s2.sigma2);
    const double sigma = std::sqrt(s2.sigma2);
    std::vector<double> zs(200);
    for (std::size_t i = 0; i < zs.size(); ++i) {
        auto prng = make_stream(717174, i);
        const auto p = simulate_path(1.0, h, {}, 800.0, prng);
        const double avg = sliding_average(p, count, 1.0, 800.0);
        zs[i] = std::sqrt(800.0) * (avg - pi.estimate) / sigma;
    }
    std::sort(zs.begin(), zs.end());
    double d = 0.0;
    const double n = static_cast<double>(zs.size());
    for (std::size_t i = 0; i < zs.size(); ++i) {
        const double c = num::normal_cdf(zs[i]);
        d = std::max(d, std::max(c - static_cast<double>(i) / n,
                                 static_cast<double>(i + 1) / n - c));
    }
    CHECK(num::ks_p_value(d, zs.size()) >= 0.01);
}

TEST_CASE("full report battery") {
    ReportConfig cfg;
    cfg.n_cycles = 2000;
    cfg.n_clusters = 2000;
    cfg.ident_paths = 5;
    cfg.ident_T = 30.0;
    cfg.ergodic_T = 1500.0;
    cfg.clt_paths = 60;
    cfg.clt_T = 300.0;
    cfg.seed = 818181;

    const auto r = full_report(cfg);
    CHECK(r.errors.empty());
    CHECK(r.all_pass);
    CHECK(r.schema == 1);
    CHECK(r.moments.kind == "regen_moments");
    CHECK(r.domination.kind == "domination");
    REQUIRE(r.identity.size() == 1);
    CHECK(r.identity[0].limit == 1e-9);
    REQUIRE(r.ergodic.size() == 1);
    REQUIRE(r.clt.size() == 2);

    std::ostringstream json1, json2;
    write_report_json(r, json1);
    write_report_json(full_report(cfg), json2);
    CHECK(json1.str() == json2.str());
    const auto parsed = nlohmann::json::parse(json1.str());
    CHECK(parsed["schema"] == 1);
    CHECK(parsed["all_pass"] == true);
    CHECK(parsed["moments"]["grid"].size() == cfg.s_grid.size());
    CHECK(parsed["domination"]["grid"][0].contains("loose_bound"));

    std::ostringstream mcj;
    write_mc_json(r.moments, mcj);
    CHECK(nlohmann::json::parse(mcj.str())["kind"] == "regen_moments");

    SUBCASE("out-of-domain finding is collected, not fatal") {
        ReportConfig bad = cfg;
        bad.theta_grid = {0.9};
        const auto rb = full_report(bad);
        CHECK(!rb.all_pass);
        REQUIRE(rb.errors.size() == 1);
        CHECK(rb.errors[0].find("domination: OutOfDomain") == 0);
        CHECK(rb.moments.all_pass());
    }

    SUBCASE("invalid configurations are rejected up front") {
        ReportConfig bad = cfg;
        bad.n_cycles = 0;
        CHECK_THROWS_AS((void)full_report(bad), ConfigError);
        bad = cfg;
        bad.lambda = 0.0;
        CHECK_THROWS_AS((void)full_report(bad), ConfigError);
        bad = cfg;
        bad.clt_paths = 5;
        CHECK_THROWS_AS((void)full_report(bad), ConfigError);
        bad = cfg;
        bad.ergodic_T = 0.0;
        CHECK_THROWS_AS((void)full_report(bad), ConfigError);
    }
}

}
