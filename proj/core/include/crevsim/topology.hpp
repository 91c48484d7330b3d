#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "crevsim/ids.hpp"

namespace crevsim {

struct Point {
    double x{0};
    double y{0};
};

struct RsuPlacement {
    RsuId id{0};
    ClusterId cluster{0};
    Point position;
    bool border_guard{false};
    ClusterId faces{0};  // adjacent cluster this guard watches; 0 for interior
};

struct ClusterInfo {
    ClusterId id{0};
    int row{0};
    int col{0};
    Point center;
    std::set<ClusterId> neighbors;  // 4-neighborhood (shared edge)
    std::vector<RsuId> rsus;
};

/// Urban grid of square clusters. Cell (r, c) spans
/// x in [c*side, (c+1)*side], y in [r*side, (r+1)*side]. One LCA sits at
/// each cluster center with a fixed coverage radius; points of a cluster
/// outside that disk form the grey area.
class ClusterGrid {
public:
    static constexpr double kCoverageRadiusM = 1000.0;

    /// Border-guard RSUs are placed on each shared edge, one set per owning
    /// cluster (so both sides of an edge are guarded). `cluster_ids`, when
    /// non-empty, assigns ids row-major; the default is 1..rows*cols.
    static ClusterGrid build(int rows, int cols, double cluster_side_m,
                             int rsus_per_border, int interior_rsus = 0,
                             std::vector<ClusterId> cluster_ids = {});

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    double side() const { return side_; }
    double width() const { return side_ * cols_; }
    double height() const { return side_ * rows_; }

    const std::map<ClusterId, ClusterInfo>& clusters() const { return clusters_; }
    const std::map<RsuId, RsuPlacement>& rsus() const { return rsus_; }
    const ClusterInfo& cluster(ClusterId id) const;
    const RsuPlacement& rsu(RsuId id) const;

    /// Bounding-box owner of a position; boundary points go to the lower
    /// ClusterId among touching cells. Throws TopologyError out of bounds.
    ClusterId owning_cluster(Point p) const;

    /// Cluster when within the owner's LCA coverage disk, nullopt when the
    /// position lies in a grey area. Throws TopologyError out of bounds.
    std::optional<ClusterId> locate(Point p) const;

    /// Guard of `dest` facing `from`, nearest to `near` along the shared
    /// edge. Throws TopologyError when the pair shares no guarded edge.
    RsuId guard_rsu(ClusterId dest, ClusterId from, Point near) const;

    /// Nearest RSU to a point, optionally restricted to one cluster.
    /// Ties break to the lower RsuId.
    RsuId nearest_rsu(Point p,
                      std::optional<ClusterId> in_cluster = std::nullopt) const;

    bool in_bounds(Point p) const;

private:
    int rows_{0};
    int cols_{0};
    double side_{0};
    std::vector<ClusterId> id_by_cell_;  // row-major
    std::map<ClusterId, ClusterInfo> clusters_;
    std::map<RsuId, RsuPlacement> rsus_;
};

}  // namespace crevsim
