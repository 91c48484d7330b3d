#pragma once

#include <cstdint>

#include "crevsim/scenario.hpp"

namespace crevsim {

/// Seeded random workload for invariant suites: up to a 3x3 grid, one clean
/// stationary anchor vehicle per cluster, 1-10 revoked adversaries that hop
/// between cluster centers (each hop crosses a guarded edge midpoint), clean
/// in-cluster movers, and scripted car-to-car traffic including one
/// stale-signature send per adversary after its last crossing. t_end 600 s,
/// all activity ends well before that so runs finish quiescent.
ScenarioConfig generate_scenario(std::uint64_t seed);

}  // namespace crevsim
