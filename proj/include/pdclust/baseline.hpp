#pragma once

#include <cstdint>

#include "pdclust/instance.hpp"
#include "pdclust/jv.hpp"

namespace pdclust {

/// k-means++ style seeding (cost-weighted client sampling, each sampled client
/// contributes its nearest unchosen facility) followed by discrete Lloyd
/// iterations with centers restricted to F, run to a fixed point.
ClusterSolution kmeanspp_lloyd(const Instance& inst, int k, uint64_t seed);

}  // namespace pdclust
