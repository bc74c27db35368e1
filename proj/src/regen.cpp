#include "hawkes/regen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "hawkes/errors.hpp"

namespace hawkes {

std::vector<BusyPeriod> busy_sweep(const std::vector<Job>& jobs) {
    std::vector<BusyPeriod> periods;
    bool open = false;
    double start = 0.0, end = 0.0, prev_arrival = -std::numeric_limits<double>::infinity();
    for (const auto& job : jobs) {
        if (job.arrival < prev_arrival)
            throw UnsortedInputError("job arrivals must be sorted ascending");
        if (job.service < 0.0) throw std::invalid_argument("negative service time");
        prev_arrival = job.arrival;
        if (open && job.arrival < end) {
            end = std::max(end, job.arrival + job.service);
        } else {
            if (open) periods.push_back({start, end});
            open = true;
            start = job.arrival;
            end = job.arrival + job.service;
        }
    }
    if (open) periods.push_back({start, end});
    return periods;
}

RegenReport regeneration_times(const PathRecord& path, double A) {
    if (A < 0.0) throw std::invalid_argument("window width A must be >= 0");

    // the initial condition occupies the server until its last point in
    // (-A, infinity) ages out of the window
    double init_max = -std::numeric_limits<double>::infinity();
    for (double s : path.init_points)
        if (s > -A) init_max = std::max(init_max, s);
    for (const auto& p : path.initial_progeny)
        if (!p.times.empty()) init_max = std::max(init_max, p.times.back());
    const bool busy_at_zero = std::isfinite(init_max);

    std::vector<Job> jobs;
    jobs.reserve(path.ancestors.size() + 1);
    if (busy_at_zero) jobs.push_back({0.0, init_max + A});
    for (const auto& a : path.ancestors) jobs.push_back({a.time, a.cluster.length() + A});
    std::sort(jobs.begin(), jobs.end(),
              [](const Job& a, const Job& b) { return a.arrival < b.arrival; });

    const auto periods = busy_sweep(jobs);

    RegenReport r;
    r.A = A;
    r.horizon = path.horizon;
    std::size_t k = 0;
    if (busy_at_zero) {
        const double end = periods[0].end;
        r.tau0 = end <= path.horizon ? end : std::numeric_limits<double>::quiet_NaN();
        k = 1;
    } else {
        r.tau0 = 0.0;
    }
    if (!std::isnan(r.tau0)) {
        double prev = r.tau0;
        for (; k < periods.size() && periods[k].end <= path.horizon; ++k) {
            if (periods[k].end == prev) continue; // zero-length ties collapse
            r.taus.push_back(periods[k].end);
            r.cycle_lengths.push_back(periods[k].end - prev);
            prev = periods[k].end;
        }
        r.incomplete_tail = prev != path.horizon;
    } else {
        r.incomplete_tail = true;
    }
    return r;
}

CycleDecomposition extract_cycles(const PathRecord& path, const RegenReport& report) {
    if (report.horizon != path.horizon)
        throw MismatchedReportError("report was built for a different horizon");

    CycleDecomposition out;
    if (std::isnan(report.tau0)) {
        out.delay.length = std::numeric_limits<double>::quiet_NaN();
        out.delay.times = path.times_in(-report.A, path.horizon);
        return out;
    }
    out.delay.length = report.tau0;
    out.delay.times = path.times_in(-report.A, report.tau0);

    double prev = report.tau0;
    for (double tau : report.taus) {
        Cycle c;
        c.length = tau - prev;
        for (double t : path.times_in(prev - report.A, tau)) c.times.push_back(t - prev);
        out.cycles.push_back(std::move(c));
        prev = tau;
    }
    return out;
}

bool verify_regeneration(const PathRecord& path, const RegenReport& report) {
    // "x leaves the window by tau" is tested as x + A <= tau, the same rounding
    // the sweep's arrival + service uses, so exact ties certify exactly
    const auto empty_at = [&](double tau) {
        for (double s : path.init_points)
            if (s + report.A > tau) return false;
        for (const auto& p : path.initial_progeny)
            if (!p.times.empty() && p.times.back() + report.A > tau) return false;
        for (const auto& a : path.ancestors) {
            if (a.time >= tau) continue; // later clusters do not count yet
            if (a.time + (a.cluster.length() + report.A) > tau) return false;
        }
        return true;
    };
    if (!std::isnan(report.tau0) && !empty_at(report.tau0)) return false;
    for (double tau : report.taus)
        if (!empty_at(tau)) return false;
    return true;
}

void write_regen_json(const RegenReport& report, std::ostream& out) {
    nlohmann::json j;
    j["A"] = report.A;
    if (std::isnan(report.tau0))
        j["tau0"] = nullptr;
    else
        j["tau0"] = report.tau0;
    j["taus"] = report.taus;
    j["cycle_lengths"] = report.cycle_lengths;
    j["incomplete_tail"] = report.incomplete_tail;
    out << j.dump(2) << '\n';
}

} // namespace hawkes
