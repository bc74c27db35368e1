#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hawkes/transfer.hpp"

namespace hawkes {

// One experiment description: model, window, horizon, seeding, replication
// count, and output location. Command-line flags override individual fields.
struct ExperimentConfig {
    double lambda = 1.0;
    TransferFunction h = TransferFunction::zero();
    double A = 0.0;
    double horizon = 100.0;
    std::vector<double> init_points;  // observed past, all <= 0, kept sorted
    std::uint64_t seed = 1;
    std::size_t replications = 1000;
    double theta_star_tol = 1e-10;
    std::string out;  // output path; empty writes to stdout
};

// Parses and validates a JSON config. Unknown keys are rejected and every
// failure names the offending field; the kernel must be sub-critical.
// Throws ConfigError.
ExperimentConfig parse_config(const std::string& text);

// parse_config on a file's contents. Throws ConfigError when unreadable.
ExperimentConfig load_config(const std::string& path);

// Serialization is the parse inverse: serialize(parse(text)) is idempotent.
std::string serialize_config(const ExperimentConfig& cfg);

}  // namespace hawkes
