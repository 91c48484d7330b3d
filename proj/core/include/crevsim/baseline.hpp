#pragma once

#include <cstdint>
#include <vector>

#include "crevsim/ids.hpp"

namespace crevsim {

/// Global CRL baseline: one monolithic, append-only list distributed to
/// every vehicle, driven by the same revocation stream as the cluster
/// protocol. Plain linear scan, no move-to-front.
class GlobalCrl {
public:
    const std::vector<CertificateId>& entries() const { return entries_; }
    std::uint64_t version() const { return version_; }
    std::size_t entry_size_bytes() const { return entry_size_bytes_; }
    void set_entry_size_bytes(std::size_t b) { entry_size_bytes_ = b; }

    /// Append if absent; dedup makes duplicate revokes no-ops.
    bool revoke(const CertificateId& cert);

    struct LookupResult {
        bool found{false};
        std::size_t scan_cost{0};  // 1 + index; full length on a miss
    };
    LookupResult lookup(const CertificateId& cert) const;

    std::size_t size_bytes() const {
        return entries_.size() * entry_size_bytes_;
    }

private:
    std::vector<CertificateId> entries_;
    std::size_t entry_size_bytes_{100};
    std::uint64_t version_{0};
};

struct DistributionModel {
    double effective_bandwidth_bytes_per_s{4000};
    double per_message_overhead_s{0};
};

/// size / bandwidth + overhead, in seconds. Strictly increasing in size.
double crl_distribution_time_s(const GlobalCrl& crl,
                               const DistributionModel& model);

double distribution_time_s(std::size_t size_bytes,
                           const DistributionModel& model);

}  // namespace crevsim
