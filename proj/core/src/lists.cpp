#include "crevsim/lists.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "crevsim/errors.hpp"

namespace crevsim {

bool Lccl::contains(const CertificateId& cert) const {
    return std::find(entries_.begin(), entries_.end(), cert) != entries_.end();
}

bool Lccl::insert_front(std::span<const CertificateId> certs) {
    std::vector<CertificateId> fresh;
    for (const auto& c : certs) {
        if (!contains(c) &&
            std::find(fresh.begin(), fresh.end(), c) == fresh.end()) {
            fresh.push_back(c);
        }
    }
    if (fresh.empty()) return false;
    entries_.insert(entries_.begin(), fresh.begin(), fresh.end());
    ++version_;
    return true;
}

bool Lccl::remove(const CertificateId& cert) {
    auto it = std::find(entries_.begin(), entries_.end(), cert);
    if (it == entries_.end()) return false;
    entries_.erase(it);
    ++version_;
    return true;
}

Lccl::LookupResult Lccl::lookup(const CertificateId& cert) const {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (entries_[i] == cert) return {true, i + 1};
    }
    return {false, entries_.size()};
}

Lccl::LookupResult Lccl::lookup_promote(const CertificateId& cert) {
    auto r = lookup(cert);
    if (r.found && r.scan_cost > 1) {
        entries_.erase(entries_.begin() + static_cast<std::ptrdiff_t>(r.scan_cost - 1));
        entries_.insert(entries_.begin(), cert);
        ++version_;
    }
    return r;
}

std::string Lccl::to_text() const {
    std::ostringstream os;
    os << "Lccl{cluster=" << cluster_ << ",version=" << version_ << ",entries=[";
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (i) os << ",";
        os << entries_[i].value;
    }
    os << "]}";
    return os.str();
}

std::size_t lccl_size_bytes(const Lccl& list, std::size_t entry_size_bytes,
                            std::size_t header_bytes) {
    if (entry_size_bytes == 0) {
        throw std::invalid_argument("lccl_size_bytes: entry_size_bytes must be > 0");
    }
    return list.entries().size() * entry_size_bytes + header_bytes;
}

bool Nccl::absorb(ClusterId neighbor, const Lccl& lccl) {
    if (!adjacent_.contains(neighbor)) {
        throw TopologyError("Nccl::absorb: cluster " + std::to_string(neighbor) +
                            " is not adjacent to RSU" + std::to_string(rsu_));
    }
    auto it = snapshots_.find(neighbor);
    if (it != snapshots_.end() && lccl.version() < it->second.version()) {
        return false;  // stale broadcast, drop
    }
    snapshots_[neighbor] = lccl;
    return true;
}

Nccl::Hit Nccl::contains(const CertificateId& cert) const {
    std::size_t scanned = 0;
    for (const auto& [cluster, snap] : snapshots_) {
        auto r = snap.lookup(cert);
        if (r.found) return {true, cluster, scanned + r.scan_cost};
        scanned += snap.entries().size();
    }
    return {false, std::nullopt, scanned};
}

std::string Nccl::to_text() const {
    std::ostringstream os;
    os << "Nccl{rsu=" << rsu_ << ",snapshots=[";
    bool first = true;
    for (const auto& [cluster, snap] : snapshots_) {
        if (!first) os << ",";
        first = false;
        os << snap.to_text();
    }
    os << "]}";
    return os.str();
}

}  // namespace crevsim
