#include "hawkes/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "hawkes/errors.hpp"

namespace hawkes {

namespace {

// sort a (times, parent, generation) triple by time, remapping parent indices
template <class T>
void sort_by_time(T& rec) {
    const std::size_t n = rec.times.size();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return rec.times[a] < rec.times[b]; });
    std::vector<int> rank(n);
    for (std::size_t i = 0; i < n; ++i) rank[order[i]] = static_cast<int>(i);

    std::vector<double> times(n);
    std::vector<int> parent(n), generation(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int src = order[i];
        times[i] = rec.times[src];
        parent[i] = rec.parent[src] < 0 ? -1 : rank[rec.parent[src]];
        generation[i] = rec.generation[src];
    }
    rec.times = std::move(times);
    rec.parent = std::move(parent);
    rec.generation = std::move(generation);
}

} // namespace

Cluster sample_cluster(const TransferFunction& h, Rng& rng) {
    const double nu = h.l1_norm();
    if (nu >= 1.0) throw NotSubcriticalError(nu);

    Cluster c;
    c.times.push_back(0.0);
    c.parent.push_back(-1);
    c.generation.push_back(0);
    if (nu > 0.0) {
        std::poisson_distribution<int> brood(nu);
        for (std::size_t i = 0; i < c.times.size(); ++i) { // BFS over the family
            const int kids = brood(rng);
            for (int k = 0; k < kids; ++k) {
                if (c.times.size() >= kClusterSizeCap) {
                    sort_by_time(c);
                    throw SizeCapError(std::move(c));
                }
                c.times.push_back(c.times[i] + h.sample_delay(rng));
                c.parent.push_back(static_cast<int>(i));
                c.generation.push_back(c.generation[i] + 1);
            }
        }
    }
    sort_by_time(c);
    return c;
}

InitialProgeny sample_initial_progeny(double anchor, const TransferFunction& h, Rng& rng) {
    if (anchor > 0.0) throw std::invalid_argument("initial points must be <= 0");
    InitialProgeny p;
    p.anchor = anchor;
    const auto first_gen = truncated_offspring(h, -anchor, rng);
    for (double birth : first_gen) {
        const Cluster sub = sample_cluster(h, rng);
        const int base = static_cast<int>(p.times.size());
        for (std::size_t i = 0; i < sub.times.size(); ++i) {
            p.times.push_back(birth + sub.times[i]);
            p.parent.push_back(sub.parent[i] < 0 ? -1 : base + sub.parent[i]);
            p.generation.push_back(sub.generation[i] + 1);
        }
    }
    sort_by_time(p);
    return p;
}

std::vector<double> PathRecord::times_in(double lo, double hi) const {
    std::vector<double> out;
    for (double s : init_points)
        if (s > lo && s <= hi) out.push_back(s);
    for (const auto& e : events) {
        if (e.time > hi) break;
        if (e.time > lo) out.push_back(e.time);
    }
    std::sort(out.begin(), out.end());
    return out;
}

void PathRecord::rebuild_events() {
    events.clear();
    std::size_t total = 0;
    for (const auto& p : initial_progeny) total += p.times.size();
    for (const auto& a : ancestors) total += a.cluster.size();
    events.reserve(total);

    const int n_anchors = static_cast<int>(initial_progeny.size());
    for (int j = 0; j < n_anchors; ++j) {
        const auto& p = initial_progeny[j];
        const int base = static_cast<int>(events.size());
        for (std::size_t i = 0; i < p.times.size(); ++i)
            events.push_back({p.times[i], j,
                              p.parent[i] < 0 ? -1 : base + p.parent[i],
                              p.generation[i], Origin::Initial});
    }
    for (int j = 0; j < static_cast<int>(ancestors.size()); ++j) {
        const auto& a = ancestors[j];
        const int base = static_cast<int>(events.size());
        for (std::size_t i = 0; i < a.cluster.size(); ++i)
            events.push_back({a.time + a.cluster.times[i], n_anchors + j,
                              a.cluster.parent[i] < 0 ? -1 : base + a.cluster.parent[i],
                              a.cluster.generation[i], Origin::Immigrant});
    }

    // sort by time, remap parent links
    const std::size_t n = events.size();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return events[a].time < events[b].time; });
    std::vector<int> rank(n);
    for (std::size_t i = 0; i < n; ++i) rank[order[i]] = static_cast<int>(i);
    std::vector<PathEvent> sorted;
    sorted.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        PathEvent e = events[order[i]];
        if (e.parent >= 0) e.parent = rank[e.parent];
        sorted.push_back(e);
    }
    events = std::move(sorted);
}

PathRecord simulate_path(double lambda, const TransferFunction& h,
                         const std::vector<double>& init_points, double horizon, Rng& rng) {
    if (lambda < 0.0 || horizon <= 0.0)
        throw std::invalid_argument("simulate_path needs lambda >= 0 and horizon > 0");
    const double nu = h.l1_norm();
    if (nu >= 1.0) throw NotSubcriticalError(nu);

    PathRecord path;
    path.lambda = lambda;
    path.horizon = horizon;
    path.init_points = init_points;
    std::sort(path.init_points.begin(), path.init_points.end());
    for (double s : path.init_points)
        if (s > 0.0) throw std::invalid_argument("initial points must be <= 0");

    for (double s : path.init_points)
        path.initial_progeny.push_back(sample_initial_progeny(s, h, rng));

    std::poisson_distribution<long> count(lambda * horizon);
    const long n = lambda > 0.0 ? count(rng) : 0;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> arrivals(n);
    for (long i = 0; i < n; ++i) arrivals[i] = horizon * (1.0 - unif(rng)); // in (0, T]
    std::sort(arrivals.begin(), arrivals.end());

    path.ancestors.reserve(arrivals.size());
    for (double t : arrivals) path.ancestors.push_back({t, sample_cluster(h, rng)});

    path.rebuild_events();
    return path;
}

void write_events_csv(const PathRecord& path, std::ostream& out) {
    out.precision(17);
    out << "time,cluster_id,parent_id,generation,origin\n";
    const int n_init = static_cast<int>(path.init_points.size());
    for (int j = 0; j < n_init; ++j)
        out << path.init_points[j] << ',' << j << ",-1,0,initial\n";
    for (const auto& e : path.events) {
        int parent_row = -1;
        if (e.parent >= 0)
            parent_row = n_init + e.parent;
        else if (e.origin == Origin::Initial)
            parent_row = e.cluster_id; // first generation hangs off its anchor row
        out << e.time << ',' << e.cluster_id << ',' << parent_row << ',' << e.generation
            << ',' << (e.origin == Origin::Initial ? "initial" : "immigrant") << '\n';
    }
}

} // namespace hawkes
