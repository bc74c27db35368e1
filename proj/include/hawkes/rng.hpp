#pragma once

#include <cstdint>
#include <random>

namespace hawkes {

using Rng = std::mt19937_64;

// Worker stream i derives from the master seed as seed XOR i, so replication k
// of an experiment is reproducible independently of how many workers ran before it.
inline Rng make_stream(std::uint64_t master_seed, std::uint64_t stream) {
    return Rng{master_seed ^ stream};
}

} // namespace hawkes
