#include "crevsim/baseline.hpp"

#include <algorithm>
#include <stdexcept>

namespace crevsim {

bool GlobalCrl::revoke(const CertificateId& cert) {
    if (std::find(entries_.begin(), entries_.end(), cert) != entries_.end()) {
        return false;
    }
    entries_.push_back(cert);
    ++version_;
    return true;
}

GlobalCrl::LookupResult GlobalCrl::lookup(const CertificateId& cert) const {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (entries_[i] == cert) return {true, i + 1};
    }
    return {false, entries_.size()};
}

double distribution_time_s(std::size_t size_bytes,
                           const DistributionModel& model) {
    if (model.effective_bandwidth_bytes_per_s <= 0) {
        throw std::invalid_argument("distribution model needs bandwidth > 0");
    }
    return static_cast<double>(size_bytes) /
               model.effective_bandwidth_bytes_per_s +
           model.per_message_overhead_s;
}

double crl_distribution_time_s(const GlobalCrl& crl,
                               const DistributionModel& model) {
    return distribution_time_s(crl.size_bytes(), model);
}

}  // namespace crevsim
