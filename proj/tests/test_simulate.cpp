#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "hawkes/errors.hpp"
#include "hawkes/numeric.hpp"
#include "hawkes/simulate.hpp"

using namespace hawkes;

namespace {

// Borel(1/2) law of total progeny for a Poisson(1/2) branching process,
// P(S = n) = e^{-n/2} (n/2)^{n-1} / n!
constexpr double kBorelHalf[8] = {
    0.60653065971263342,  0.18393972058572116,  0.083673810055661186,
    0.045111761078870897, 0.026720377156217056, 0.016803135574154081,
    0.011014049982181142, 0.0074425453262157939};
constexpr double kBorelHalfTail9 = 0.01876394052834526;
constexpr double kChi2Crit8At1pct = 20.090235029663233;

void check_genealogy(const std::vector<double>& times, const std::vector<int>& parent,
                     const std::vector<int>& generation, int root_generation) {
    REQUIRE(times.size() == parent.size());
    REQUIRE(times.size() == generation.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (i + 1 < times.size()) CHECK(times[i] <= times[i + 1]);
        if (parent[i] < 0) {
            CHECK(generation[i] == root_generation);
        } else {
            CHECK(parent[i] < static_cast<int>(i));
            CHECK(times[parent[i]] < times[i]);
            CHECK(generation[i] == generation[parent[i]] + 1);
        }
    }
}

double borel_chi_square(const TransferFunction& h, int n, Rng& rng) {
    std::vector<long> counts(9, 0);
    for (int i = 0; i < n; ++i) {
        const std::size_t size = sample_cluster(h, rng).size();
        counts[std::min<std::size_t>(size, 9) - 1] += 1;
    }
    double chi2 = 0.0;
    for (int k = 0; k < 9; ++k) {
        const double expected = n * (k < 8 ? kBorelHalf[k] : kBorelHalfTail9);
        const double diff = counts[k] - expected;
        chi2 += diff * diff / expected;
    }
    return chi2;
}

} // namespace

TEST_SUITE("simulate") {

TEST_CASE("zero kernel cluster is a single point") {
    auto rng = make_stream(11, 0);
    const auto c = sample_cluster(TransferFunction::zero(), rng);
    CHECK(c.size() == 1);
    CHECK(c.times[0] == 0.0);
    CHECK(c.parent[0] == -1);
    CHECK(c.length() == 0.0);
}

TEST_CASE("cluster size follows the Borel law") {
    auto rng = make_stream(20250812, 0);
    const int n = 100000;
    CHECK(borel_chi_square(TransferFunction::exponential(0.25, 0.5), n, rng) <
          kChi2Crit8At1pct);
    CHECK(borel_chi_square(TransferFunction::uniform_box(0.25, 2.0), n, rng) <
          kChi2Crit8At1pct);
}

TEST_CASE("mean cluster size at half-critical mass is two") {
    auto rng = make_stream(31, 0);
    const auto h = TransferFunction::exponential(0.5, 1.0);
    const int n = 100000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double s = static_cast<double>(sample_cluster(h, rng).size());
        sum += s;
        sumsq += s * s;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sumsq / n - mean * mean) / n);
    CHECK(std::abs(mean - 2.0) < 3.0 * se);
}

TEST_CASE("cluster length is exponentially dominated") {
    // kernel has theta* = 0.5, so P(L > x) <= exp(-x/2)
    auto rng = make_stream(47, 0);
    const auto h = TransferFunction::exponential(0.5, 1.0);
    const int n = 100000;
    const double grid[4] = {1.0, 2.0, 4.0, 8.0};
    long over[4] = {0, 0, 0, 0};
    for (int i = 0; i < n; ++i) {
        const double len = sample_cluster(h, rng).length();
        for (int k = 0; k < 4; ++k)
            if (len > grid[k]) over[k] += 1;
    }
    for (int k = 0; k < 4; ++k) {
        const double p_hat = static_cast<double>(over[k]) / n;
        const double se = std::sqrt(p_hat * (1.0 - p_hat) / n);
        CHECK(p_hat <= std::exp(-0.5 * grid[k]) + 3.0 * se);
    }
}

TEST_CASE("sampled genealogies are well formed") {
    auto rng = make_stream(53, 0);
    const auto h = TransferFunction::exponential(0.5, 1.0);
    for (int i = 0; i < 200; ++i) {
        const auto c = sample_cluster(h, rng);
        CHECK(c.times[0] == 0.0);
        check_genealogy(c.times, c.parent, c.generation, 0);
        CHECK(c.length() == c.times.back());
    }
    for (int i = 0; i < 50; ++i) {
        const auto p = sample_initial_progeny(-0.5, h, rng);
        check_genealogy(p.times, p.parent, p.generation, 1);
        for (double t : p.times) CHECK(t > 0.0);
    }
}

TEST_CASE("initial progeny respects support and truncation") {
    auto rng = make_stream(61, 0);

    const auto box = TransferFunction::uniform_box(0.25, 2.0);
    for (int i = 0; i < 200; ++i)
        CHECK(sample_initial_progeny(-2.5, box, rng).times.empty());

    // anchor at 0: first generation is Poisson(l1 norm) distributed
    const auto h = TransferFunction::exponential(0.5, 1.0);
    const int n = 100000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto p = sample_initial_progeny(0.0, h, rng);
        const double first = static_cast<double>(
            std::count(p.parent.begin(), p.parent.end(), -1));
        sum += first;
        sumsq += first * first;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sumsq / n - mean * mean) / n);
    CHECK(std::abs(mean - 0.5) < 3.0 * se);
}

TEST_CASE("path event rates match the superposition law") {
    auto rng = make_stream(71, 0);

    const auto empty = simulate_path(0.0, TransferFunction::zero(), {}, 10.0, rng);
    CHECK(empty.events.empty());

    const double T = 1000.0;
    const auto poisson = simulate_path(1.0, TransferFunction::zero(), {}, T, rng);
    const double rate = static_cast<double>(poisson.events.size()) / T;
    CHECK(std::abs(rate - 1.0) < 3.0 * std::sqrt(1.0 / T));
    for (const auto& a : poisson.ancestors) {
        CHECK(a.time > 0.0);
        CHECK(a.time <= T);
        CHECK(a.cluster.size() == 1);
    }

    // all descendants counted, including those past the horizon; for Borel(1/2)
    // cluster sizes E[S^2] = 8, so Var(total)/T^2 = 8/T
    const auto h = TransferFunction::exponential(0.5, 1.0);
    const auto path = simulate_path(1.0, h, {}, T, rng);
    std::size_t total = 0;
    for (const auto& a : path.ancestors) total += a.cluster.size();
    CHECK(total == path.events.size());
    CHECK(std::abs(static_cast<double>(total) / T - 2.0) < 3.0 * std::sqrt(8.0 / T));
    CHECK(std::is_sorted(path.events.begin(), path.events.end(),
                         [](const PathEvent& a, const PathEvent& b) {
                             return a.time < b.time;
                         }));
}

TEST_CASE("descendants beyond the horizon are retained") {
    auto rng = make_stream(83, 0);
    const auto h = TransferFunction::exponential(0.45, 0.5); // mass 0.9, mean delay 2
    const auto path = simulate_path(2.0, h, {}, 5.0, rng);
    long beyond = 0;
    for (const auto& e : path.events)
        if (e.time > path.horizon) beyond += 1;
    CHECK(beyond > 0);
}

TEST_CASE("time rescaling yields unit exponential gaps") {
    auto rng = make_stream(97, 0);
    const double lambda = 1.0, T = 600.0;
    const auto h = TransferFunction::exponential(0.5, 1.0);
    const auto path = simulate_path(lambda, h, {}, T, rng);

    std::vector<double> times;
    for (const auto& e : path.events)
        if (e.time <= T) times.push_back(e.time);

    std::vector<double> gaps;
    double prev = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        double compensator = lambda * times[i];
        for (std::size_t j = 0; j < i; ++j)
            compensator += h.integral_to(times[i] - times[j]);
        gaps.push_back(compensator - prev);
        prev = compensator;
    }

    std::sort(gaps.begin(), gaps.end());
    const std::size_t n = gaps.size();
    REQUIRE(n > 500);
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double cdf = 1.0 - std::exp(-gaps[i]);
        d = std::max(d, std::abs(cdf - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - cdf));
    }
    CHECK(num::ks_p_value(d, n) > 0.01);
}

TEST_CASE("seeded streams reproduce and split") {
    const auto h = TransferFunction::exponential(0.5, 1.0);
    auto r1 = make_stream(12345, 3);
    auto r2 = make_stream(12345, 3);
    auto r3 = make_stream(12345, 4);
    const auto a = simulate_path(1.0, h, {-1.0}, 50.0, r1);
    const auto b = simulate_path(1.0, h, {-1.0}, 50.0, r2);
    const auto c = simulate_path(1.0, h, {-1.0}, 50.0, r3);
    REQUIRE(a.events.size() == b.events.size());
    for (std::size_t i = 0; i < a.events.size(); ++i)
        CHECK(a.events[i].time == b.events[i].time);
    bool differs = a.events.size() != c.events.size();
    for (std::size_t i = 0; !differs && i < a.events.size(); ++i)
        differs = a.events[i].time != c.events[i].time;
    CHECK(differs);
}

TEST_CASE("window queries use half-open intervals") {
    PathRecord path;
    path.lambda = 1.0;
    path.horizon = 10.0;
    path.init_points = {-1.0, 0.0};
    path.initial_progeny.push_back({-1.0, {0.5}, {-1}, {1}});
    path.initial_progeny.push_back({0.0, {}, {}, {}});
    path.ancestors.push_back({2.0, {{0.0, 1.0}, {-1, 0}, {0, 1}}});
    path.rebuild_events();

    REQUIRE(path.events.size() == 3);
    CHECK(path.events[0].time == 0.5);
    CHECK(path.events[0].cluster_id == 0);
    CHECK(path.events[0].origin == Origin::Initial);
    CHECK(path.events[1].time == 2.0);
    CHECK(path.events[1].parent == -1);
    CHECK(path.events[2].time == 3.0);
    CHECK(path.events[2].parent == 1);
    CHECK(path.events[2].cluster_id == 2);

    CHECK(path.times_in(0.0, 2.0) == std::vector<double>{0.5, 2.0});
    CHECK(path.times_in(-1.0, 0.5) == std::vector<double>{0.0, 0.5});
    CHECK(path.times_in(3.0, 100.0).empty());
}

TEST_CASE("csv export is bit faithful and structurally sound") {
    auto rng = make_stream(2024, 0);
    const auto h = TransferFunction::exponential(0.5, 1.0);
    const auto path = simulate_path(1.0, h, {-0.5, 0.0}, 5.0, rng);

    std::ostringstream out;
    write_events_csv(path, out);
    std::istringstream in(out.str());

    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "time,cluster_id,parent_id,generation,origin");

    struct Row {
        double time;
        int cluster_id, parent_id, generation;
        std::string origin;
    };
    std::vector<Row> rows;
    while (std::getline(in, line)) {
        Row r;
        std::size_t pos = 0;
        auto field = [&] {
            const auto comma = line.find(',', pos);
            const auto s = line.substr(pos, comma - pos);
            pos = comma == std::string::npos ? line.size() : comma + 1;
            return s;
        };
        r.time = std::strtod(field().c_str(), nullptr);
        r.cluster_id = std::atoi(field().c_str());
        r.parent_id = std::atoi(field().c_str());
        r.generation = std::atoi(field().c_str());
        r.origin = field();
        rows.push_back(r);
    }

    const std::size_t n_init = path.init_points.size();
    REQUIRE(rows.size() == n_init + path.events.size());
    for (std::size_t j = 0; j < n_init; ++j) {
        CHECK(rows[j].time == path.init_points[j]); // 17 digits reload exactly
        CHECK(rows[j].cluster_id == static_cast<int>(j));
        CHECK(rows[j].parent_id == -1);
        CHECK(rows[j].generation == 0);
        CHECK(rows[j].origin == "initial");
    }
    for (std::size_t i = 0; i < path.events.size(); ++i) {
        const auto& e = path.events[i];
        const auto& r = rows[n_init + i];
        CHECK(r.time == e.time);
        CHECK(r.cluster_id == e.cluster_id);
        CHECK(r.generation == e.generation);
        CHECK(r.origin == (e.origin == Origin::Initial ? "initial" : "immigrant"));
        if (r.parent_id >= 0) {
            CHECK(r.parent_id < static_cast<int>(n_init + i));
            CHECK(rows[r.parent_id].time < r.time);
            CHECK(r.generation == rows[r.parent_id].generation + 1);
        } else {
            CHECK(r.generation == 0);
        }
    }
}

TEST_CASE("near-critical clusters hit the size cap") {
    auto rng = make_stream(131, 0);
    const auto h = TransferFunction::exponential(0.9999999, 1.0);
    bool capped = false;
    for (int i = 0; i < 50000 && !capped; ++i) {
        try {
            (void)sample_cluster(h, rng);
        } catch (const SizeCapError& e) {
            capped = true;
            CHECK(e.partial.size() == kClusterSizeCap);
            CHECK(e.partial.times[0] == 0.0);
            CHECK(std::is_sorted(e.partial.times.begin(), e.partial.times.end()));
        }
    }
    CHECK(capped);
}

TEST_CASE("rejects invalid inputs") {
    auto rng = make_stream(1, 0);
    CHECK_THROWS_AS((void)sample_cluster(TransferFunction::exponential(2.0, 1.0), rng),
                    NotSubcriticalError);
    CHECK_THROWS_AS(
        (void)simulate_path(1.0, TransferFunction::zero(), {0.5}, 10.0, rng),
        std::invalid_argument);
    CHECK_THROWS_AS((void)simulate_path(1.0, TransferFunction::zero(), {}, -1.0, rng),
                    std::invalid_argument);
}

} // TEST_SUITE
