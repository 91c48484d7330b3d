#pragma once

#include <stdexcept>
#include <string>

namespace crevsim {

// Scenario/config validation failure. CLI maps this to exit code 2.
struct ScenarioError : std::runtime_error {
    explicit ScenarioError(const std::string& what) : std::runtime_error(what) {}
};

// Wiring or invariant breach inside a run. CLI maps this to exit code 1.
struct EngineError : std::runtime_error {
    explicit EngineError(const std::string& what) : std::runtime_error(what) {}
};

// Grid misconfiguration (e.g. absorbing an LCCL from a non-adjacent cluster).
struct TopologyError : std::runtime_error {
    explicit TopologyError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace crevsim
