#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "crevsim/ids.hpp"

namespace crevsim {

/// Local Cluster Certificate List: ordered revocation list scoped to one
/// cluster. Front of the list is index 0; new entries are prepended and
/// lookups promote hits to the front (self-organizing linear scan).
class Lccl {
public:
    Lccl() = default;
    explicit Lccl(ClusterId cluster) : cluster_(cluster) {}

    ClusterId cluster() const { return cluster_; }
    const std::vector<CertificateId>& entries() const { return entries_; }
    std::uint64_t version() const { return version_; }
    bool contains(const CertificateId& cert) const;

    /// Prepend every cert not already present, preserving batch order
    /// (first listed ends up frontmost). Returns true if the list changed;
    /// the version is bumped at most once per batch.
    bool insert_front(std::span<const CertificateId> certs);
    bool insert_front(std::initializer_list<CertificateId> certs) {
        return insert_front(std::span(certs.begin(), certs.size()));
    }

    /// Remove one cert. No-op (version untouched) when absent.
    bool remove(const CertificateId& cert);

    struct LookupResult {
        bool found{false};
        std::size_t scan_cost{0};  // 1 + index scanned; 0 on empty list
    };

    /// Linear scan; on a hit the entry is moved to the front. Version is
    /// bumped only when the entry actually moves.
    LookupResult lookup_promote(const CertificateId& cert);

    /// Scan without promotion (used where the list must stay untouched).
    LookupResult lookup(const CertificateId& cert) const;

    std::string to_text() const;

private:
    ClusterId cluster_{0};
    std::vector<CertificateId> entries_;
    std::uint64_t version_{0};
};

/// Serialized size model: |entries| * entry_size + header. Throws
/// std::invalid_argument on entry_size_bytes == 0.
std::size_t lccl_size_bytes(const Lccl& list, std::size_t entry_size_bytes,
                            std::size_t header_bytes);

/// Neighbor Cluster Certificate List: per-RSU map of the last-received
/// LCCL snapshot of each faced neighbor cluster.
class Nccl {
public:
    Nccl() = default;
    Nccl(RsuId rsu, std::set<ClusterId> adjacent)
        : rsu_(rsu), adjacent_(std::move(adjacent)) {}

    RsuId rsu() const { return rsu_; }
    const std::set<ClusterId>& adjacent() const { return adjacent_; }
    const std::map<ClusterId, Lccl>& snapshots() const { return snapshots_; }

    /// Replace the snapshot for `neighbor` iff the incoming version is not
    /// older than the stored one. Returns false when the broadcast is
    /// stale and dropped. Throws TopologyError for a non-adjacent cluster.
    bool absorb(ClusterId neighbor, const Lccl& lccl);

    struct Hit {
        bool found{false};
        std::optional<ClusterId> origin;
        std::size_t scan_cost{0};
    };

    /// Membership test over the union of snapshots; on a multi-neighbor
    /// hit the lowest ClusterId wins. Scan cost counts entries examined
    /// in ascending cluster-id order.
    Hit contains(const CertificateId& cert) const;

    std::string to_text() const;

private:
    RsuId rsu_{0};
    std::set<ClusterId> adjacent_;
    std::map<ClusterId, Lccl> snapshots_;
};

}  // namespace crevsim
