#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace crevsim {

using ClusterId = int;
using RsuId = int;

// Simulation time in microseconds.
using Time = std::uint64_t;

constexpr Time seconds_to_us(double s) {
    return static_cast<Time>(s * 1e6 + 0.5);
}
constexpr double us_to_seconds(Time t) {
    return static_cast<double>(t) / 1e6;
}

struct CertificateId {
    std::string value;
    auto operator<=>(const CertificateId&) const = default;
};

struct PublicKeyId {
    std::string value;
    auto operator<=>(const PublicKeyId&) const = default;
};

struct PrivateKeyId {
    std::string value;
    auto operator<=>(const PrivateKeyId&) const = default;
};

// Actor addressing for the event engine and traces.
struct ActorId {
    enum class Kind { Vehicle, Rsu, Lca };
    Kind kind{Kind::Vehicle};
    std::string name;  // "V25", "RSU4", "LCA1"

    auto operator<=>(const ActorId&) const = default;

    static ActorId vehicle(const CertificateId& cert) {
        return {Kind::Vehicle, cert.value};
    }
    static ActorId rsu(RsuId id) { return {Kind::Rsu, "RSU" + std::to_string(id)}; }
    static ActorId lca(ClusterId cluster) {
        return {Kind::Lca, "LCA" + std::to_string(cluster)};
    }
};

}  // namespace crevsim
