#pragma once

#include <ostream>

#include "crevsim/engine.hpp"
#include "crevsim/report.hpp"
#include "crevsim/scenario.hpp"

namespace crevsim {

/// Materialize a configured world: grid, LCAs (seeded with the initial
/// revocations), RSUs (NCCLs primed with the faced neighbor's list),
/// provisioned vehicles, channel, baseline CRL, and every mobility event
/// scheduled in roster order. Timers are not started yet.
World build_world(const ScenarioConfig& cfg, std::ostream* trace = nullptr);

/// Build, start timers, run to quiescence at t_end, aggregate. When `trace`
/// is given the header record and one ndjson line per applied event are
/// written to it.
RunReport run_scenario(const ScenarioConfig& cfg, std::ostream* trace = nullptr);

/// Report aggregation over a finished world (exposed for tests that drive
/// the engine directly).
RunReport summarize(const World& world, const ScenarioConfig& cfg);

}  // namespace crevsim
