#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "crevsim/ids.hpp"
#include "crevsim/topology.hpp"

namespace crevsim {

struct Waypoint {
    double t_s{0};
    Point pos;
};

struct ScriptedEvent {
    enum class Kind { SendC2C, ReportSafety, GreyRequest };
    double t_s{0};
    Kind kind{Kind::SendC2C};
    CertificateId target;   // SendC2C
    std::string payload;    // SendC2C / ReportSafety body
    bool use_stale{false};  // SendC2C: seal with the retained pre-rotation sig
    ClusterId cluster{0};   // GreyRequest: cluster whose signature is wanted
};

struct VehicleItinerary {
    CertificateId vehicle;
    std::vector<Waypoint> waypoints;
    std::vector<ScriptedEvent> events;
};

// Position along the piecewise-linear path, clamped at both ends.
Point position_at(const VehicleItinerary& itin, double t_s);

struct BorderCrossing {
    CertificateId vehicle;
    ClusterId from{0};
    ClusterId to{0};
    RsuId rsu{0};
};
struct EnterGreyArea {
    CertificateId vehicle;
};
struct LeaveGreyArea {
    CertificateId vehicle;
    ClusterId into{0};
};
struct ScriptedAction {
    CertificateId vehicle;
    ScriptedEvent event;
    RsuId via_rsu{0};  // resolved nearest RSU at the event position
};

struct MobilityEvent {
    Time at{0};
    std::variant<BorderCrossing, EnterGreyArea, LeaveGreyArea, ScriptedAction>
        what;
};

/// Walk the itinerary over (from_s, to_s], emitting border crossings,
/// grey-area transitions and scripted events in time order. Deterministic
/// for a fixed itinerary. Throws ScenarioError if the path leaves the grid.
std::vector<MobilityEvent> advance(const ClusterGrid& grid,
                                   const VehicleItinerary& itin, double from_s,
                                   double to_s);

}  // namespace crevsim
