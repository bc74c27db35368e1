#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "hawkes/rng.hpp"
#include "hawkes/transfer.hpp"

namespace hawkes {

// One branching family: times relative to its root, sorted, times[0] == 0.
// parent[i] indexes into times; parent[0] == -1. generation[i] is tree depth.
struct Cluster {
    std::vector<double> times;
    std::vector<int> parent;
    std::vector<int> generation;

    std::size_t size() const { return times.size(); }
    double length() const { return times.empty() ? 0.0 : times.back(); }
};

inline constexpr std::size_t kClusterSizeCap = 1'000'000;

// Raised when a cluster exceeds kClusterSizeCap points; carries what was built.
struct SizeCapError : std::runtime_error {
    explicit SizeCapError(Cluster built)
        : std::runtime_error("cluster size cap exceeded"), partial(std::move(built)) {}
    Cluster partial;
};

// Family of one individual at time 0: each member spawns Poisson(l1_norm)
// children at i.i.d. kernel delays. Requires l1_norm < 1 (NotSubcriticalError).
Cluster sample_cluster(const TransferFunction& h, Rng& rng);

// Offspring on (0, inf) of one initial individual sitting at anchor <= 0:
// first-generation births from the kernel tail beyond -anchor, each carrying a
// full independent family. Times are absolute (> 0), sorted; parent[i] indexes
// into times with -1 for the first generation (their parent is the anchor).
struct InitialProgeny {
    double anchor = 0.0;
    std::vector<double> times;
    std::vector<int> parent;
    std::vector<int> generation; // anchor counts as generation 0
};

InitialProgeny sample_initial_progeny(double anchor, const TransferFunction& h, Rng& rng);

enum class Origin { Immigrant, Initial };

struct PathEvent {
    double time;
    int cluster_id; // initial anchors first (in init_points order), then immigrants
    int parent;     // index into PathRecord::events, -1 for roots/first generation
    int generation;
    Origin origin;
};

struct Ancestor {
    double time; // immigrant arrival in (0, horizon]
    Cluster cluster;
};

struct PathRecord {
    double lambda = 0.0;
    double horizon = 0.0;
    std::vector<double> init_points; // observed past, all <= 0, sorted
    std::vector<InitialProgeny> initial_progeny;
    std::vector<Ancestor> ancestors;
    std::vector<PathEvent> events; // all points on (0, inf), sorted by time

    // times of all points (initial condition + events) in (lo, hi], sorted
    std::vector<double> times_in(double lo, double hi) const;
    // rebuild the merged event list from ancestors + initial progeny
    void rebuild_events();
};

// Immigrants arrive as a Poisson(lambda) stream on (0, horizon]; each roots a
// cluster. Descendants beyond the horizon are retained. The initial points
// contribute their progeny on (0, inf).
PathRecord simulate_path(double lambda, const TransferFunction& h,
                         const std::vector<double>& init_points, double horizon, Rng& rng);

// CSV "time,cluster_id,parent_id,generation,origin", 17 significant digits.
// Rows are the initial points (generation 0) followed by the events; parent_id
// refers to row indices, -1 for roots.
void write_events_csv(const PathRecord& path, std::ostream& out);

} // namespace hawkes
