#include "crevsim/topology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "crevsim/errors.hpp"

namespace crevsim {

namespace {

double dist(Point a, Point b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

}  // namespace

ClusterGrid ClusterGrid::build(int rows, int cols, double cluster_side_m,
                               int rsus_per_border, int interior_rsus,
                               std::vector<ClusterId> cluster_ids) {
    if (rows < 1 || cols < 1) {
        throw TopologyError("grid dimensions must be positive");
    }
    if (cluster_side_m <= 0) {
        throw TopologyError("cluster side must be positive");
    }
    if (rsus_per_border < 1) {
        throw TopologyError("rsus_per_border must be at least 1");
    }
    const std::size_t n_cells = static_cast<std::size_t>(rows) * cols;
    if (cluster_ids.empty()) {
        cluster_ids.resize(n_cells);
        for (std::size_t i = 0; i < n_cells; ++i) {
            cluster_ids[i] = static_cast<ClusterId>(i + 1);
        }
    }
    if (cluster_ids.size() != n_cells) {
        throw TopologyError("cluster_ids must cover every cell exactly once");
    }
    {
        auto sorted = cluster_ids;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw TopologyError("cluster_ids contains a duplicate");
        }
    }

    ClusterGrid g;
    g.rows_ = rows;
    g.cols_ = cols;
    g.side_ = cluster_side_m;
    g.id_by_cell_ = cluster_ids;

    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            ClusterId id = cluster_ids[static_cast<std::size_t>(r) * cols + c];
            ClusterInfo info;
            info.id = id;
            info.row = r;
            info.col = c;
            info.center = {(c + 0.5) * cluster_side_m, (r + 0.5) * cluster_side_m};
            auto neighbor = [&](int nr, int nc) {
                if (nr < 0 || nr >= rows || nc < 0 || nc >= cols) return;
                info.neighbors.insert(
                    cluster_ids[static_cast<std::size_t>(nr) * cols + nc]);
            };
            neighbor(r - 1, c);
            neighbor(r + 1, c);
            neighbor(r, c - 1);
            neighbor(r, c + 1);
            g.clusters_[id] = info;
        }
    }

    // Border guards: per cluster in ascending id, per direction N,E,S,W,
    // evenly spaced along each shared edge. Ids are sequential from 1.
    RsuId next_id = 1;
    for (auto& [id, info] : g.clusters_) {
        const double x0 = info.col * cluster_side_m;
        const double y0 = info.row * cluster_side_m;
        struct Edge {
            int dr, dc;
            bool vertical;  // edge line orientation: vertical edges vary in y
        };
        const Edge edges[4] = {
            {-1, 0, false},  // N: y = y0
            {0, 1, true},    // E: x = x0 + side
            {1, 0, false},   // S: y = y0 + side
            {0, -1, true},   // W: x = x0
        };
        for (const auto& e : edges) {
            int nr = info.row + e.dr, nc = info.col + e.dc;
            if (nr < 0 || nr >= rows || nc < 0 || nc >= cols) continue;
            ClusterId faced =
                cluster_ids[static_cast<std::size_t>(nr) * cols + nc];
            for (int i = 1; i <= rsus_per_border; ++i) {
                double f = static_cast<double>(i) / (rsus_per_border + 1);
                Point pos;
                if (e.vertical) {
                    pos = {e.dc > 0 ? x0 + cluster_side_m : x0,
                           y0 + f * cluster_side_m};
                } else {
                    pos = {x0 + f * cluster_side_m,
                           e.dr > 0 ? y0 + cluster_side_m : y0};
                }
                RsuPlacement p{next_id, id, pos, true, faced};
                g.rsus_[next_id] = p;
                info.rsus.push_back(next_id);
                ++next_id;
            }
        }
        for (int i = 0; i < interior_rsus; ++i) {
            RsuPlacement p{next_id, id, info.center, false, 0};
            g.rsus_[next_id] = p;
            info.rsus.push_back(next_id);
            ++next_id;
        }
    }
    return g;
}

const ClusterInfo& ClusterGrid::cluster(ClusterId id) const {
    auto it = clusters_.find(id);
    if (it == clusters_.end()) {
        throw TopologyError("unknown cluster " + std::to_string(id));
    }
    return it->second;
}

const RsuPlacement& ClusterGrid::rsu(RsuId id) const {
    auto it = rsus_.find(id);
    if (it == rsus_.end()) {
        throw TopologyError("unknown RSU " + std::to_string(id));
    }
    return it->second;
}

bool ClusterGrid::in_bounds(Point p) const {
    return p.x >= 0 && p.x <= width() && p.y >= 0 && p.y <= height();
}

ClusterId ClusterGrid::owning_cluster(Point p) const {
    if (!in_bounds(p)) {
        throw TopologyError("position out of grid bounds");
    }
    auto cells_for = [](double v, double side, int n) {
        std::vector<int> cells;
        int c = std::min(n - 1, std::max(0, static_cast<int>(std::floor(v / side))));
        cells.push_back(c);
        // Boundary point: the lower cell also contains it.
        if (c > 0 && v == c * side) cells.push_back(c - 1);
        return cells;
    };
    ClusterId best = std::numeric_limits<ClusterId>::max();
    for (int r : cells_for(p.y, side_, rows_)) {
        for (int c : cells_for(p.x, side_, cols_)) {
            best = std::min(best,
                            id_by_cell_[static_cast<std::size_t>(r) * cols_ + c]);
        }
    }
    return best;
}

std::optional<ClusterId> ClusterGrid::locate(Point p) const {
    ClusterId owner = owning_cluster(p);
    if (dist(p, cluster(owner).center) <= kCoverageRadiusM + 1e-9) return owner;
    return std::nullopt;
}

RsuId ClusterGrid::guard_rsu(ClusterId dest, ClusterId from, Point near) const {
    RsuId best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (RsuId id : cluster(dest).rsus) {
        const auto& p = rsus_.at(id);
        if (!p.border_guard || p.faces != from) continue;
        double d = dist(p.position, near);
        if (d < best_d) {
            best_d = d;
            best = id;
        }
    }
    if (best == 0) {
        throw TopologyError("no guard RSU of cluster " + std::to_string(dest) +
                            " faces cluster " + std::to_string(from));
    }
    return best;
}

RsuId ClusterGrid::nearest_rsu(Point p, std::optional<ClusterId> in_cluster) const {
    RsuId best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& [id, placement] : rsus_) {
        if (in_cluster && placement.cluster != *in_cluster) continue;
        double d = dist(placement.position, p);
        if (d < best_d) {
            best_d = d;
            best = id;
        }
    }
    if (best == 0) throw TopologyError("grid has no matching RSU");
    return best;
}

}  // namespace crevsim
