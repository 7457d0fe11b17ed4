#include "mtrp/fusion.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <tuple>

#include <Eigen/Dense>

#include "mtrp/errors.hpp"

namespace mtrp {

namespace {

double azimuth_gap_deg(double a, double b) { return std::abs(wrap_azimuth_deg(a - b)); }

}  // namespace

std::vector<int> select_trps(std::span<const TrpCandidate> candidates, const SelectionConfig& cfg) {
    if (candidates.empty()) throw SelectionError("no candidate TRPs");
    if (cfg.max_count < 1) throw SelectionError("max_count must be at least 1");
    const double snr_floor = db2lin(cfg.snr_threshold_db);

    std::vector<const TrpCandidate*> pool;
    const TrpCandidate* serving = nullptr;
    for (const auto& c : candidates) {
        if (c.trp_id == cfg.serving_trp_id && cfg.serving_trp_id != 0) {
            serving = &c;
        } else if (c.mean_snr >= snr_floor && c.detection_rate >= cfg.min_detection_rate) {
            pool.push_back(&c);
        }
    }

    // Preference order for ties: higher detection rate, then lower id.
    auto better = [](const TrpCandidate* a, const TrpCandidate* b) {
        if (a->detection_rate != b->detection_rate) return a->detection_rate > b->detection_rate;
        return a->trp_id < b->trp_id;
    };

    std::vector<const TrpCandidate*> chosen;
    if (serving) chosen.push_back(serving);
    if (chosen.empty()) {
        if (pool.empty()) throw SelectionError("no TRP passes the SNR and detection-rate filters");
        auto first = std::min_element(pool.begin(), pool.end(), better);
        chosen.push_back(*first);
        pool.erase(first);
    }
    while (static_cast<int>(chosen.size()) < cfg.max_count && !pool.empty()) {
        auto best = pool.end();
        double best_gap = -1.0;
        for (auto it = pool.begin(); it != pool.end(); ++it) {
            double gap = 360.0;
            for (const auto* c : chosen) gap = std::min(gap, azimuth_gap_deg((*it)->azimuth_deg, c->azimuth_deg));
            if (gap > best_gap || (gap == best_gap && better(*it, *best))) {
                best_gap = gap;
                best = it;
            }
        }
        chosen.push_back(*best);
        pool.erase(best);
    }

    std::vector<int> ids;
    for (const auto* c : chosen) ids.push_back(c->trp_id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::vector<int> Cluster::distinct_trps() const {
    std::vector<int> ids;
    for (const auto& m : members) ids.push_back(m.trp_id);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

std::vector<Cluster> cluster_detections(std::span<const Measurement> measurements, double d_3d) {
    if (!(d_3d > 0.0)) throw ContractError("gating distance must be positive");
    std::vector<std::size_t> order(measurements.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& x = measurements[a];
        const auto& y = measurements[b];
        if (x.gamma != y.gamma) return x.gamma > y.gamma;
        return std::tie(x.trp_id, x.position.x(), x.position.y(), x.position.z()) <
               std::tie(y.trp_id, y.position.x(), y.position.y(), y.position.z());
    });

    std::vector<Cluster> clusters;
    std::vector<std::pair<double, std::size_t>> nearest;
    for (std::size_t idx : order) {
        const Measurement& m = measurements[idx];
        const double w = std::max(m.gamma, 0.0);

        nearest.clear();
        for (std::size_t c = 0; c < clusters.size(); ++c) {
            const double d = (m.position - clusters[c].centroid).norm();
            if (d <= d_3d) nearest.emplace_back(d, c);
        }
        std::sort(nearest.begin(), nearest.end());

        bool placed = false;
        for (const auto& [dist, c] : nearest) {
            Cluster& cl = clusters[c];
            const double total = cl.snr_sum + w;
            const Position3D centroid =
                total > 0.0 ? Position3D((cl.centroid * cl.snr_sum + m.position * w) / total) : cl.centroid;
            bool fits = (m.position - centroid).norm() <= d_3d;
            for (std::size_t j = 0; fits && j < cl.members.size(); ++j) {
                fits = (cl.members[j].position - centroid).norm() <= d_3d;
            }
            if (!fits) continue;
            cl.centroid = centroid;
            cl.snr_sum = total;
            cl.members.push_back(m);
            cl.member_indices.push_back(idx);
            placed = true;
            break;
        }
        if (!placed) {
            Cluster cl;
            cl.centroid = m.position;
            cl.snr_sum = w;
            cl.members.push_back(m);
            cl.member_indices.push_back(idx);
            clusters.push_back(std::move(cl));
        }
    }
    return clusters;
}

bool vote(const Cluster& cluster, int v_th) {
    if (v_th < 1) throw ContractError("voting threshold must be at least 1");
    return static_cast<int>(cluster.distinct_trps().size()) >= v_th;
}

Position3D fuse_position(const Cluster& cluster) {
    if (cluster.members.empty()) throw ContractError("cannot fuse an empty cluster");
    double total = 0.0;
    for (const auto& m : cluster.members) {
        if (!(m.gamma > 0.0)) throw ContractError("fusion weights need positive SNR");
        total += m.gamma;
    }
    Position3D p = Position3D::Zero();
    for (const auto& m : cluster.members) p += (m.gamma / total) * m.position;
    return p;
}

VelocityEstimate reconstruct_velocity(std::span<const VelocityMember> members, int k_strongest) {
    if (members.empty()) throw ContractError("velocity reconstruction needs at least one member");
    if (k_strongest < 1) throw ContractError("k_strongest must be at least 1");

    std::vector<std::size_t> order(members.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return members[a].gamma > members[b].gamma; });
    const std::size_t k = std::min(order.size(), static_cast<std::size_t>(k_strongest));

    Eigen::MatrixXd R(static_cast<Eigen::Index>(k), 3);
    Eigen::VectorXd vr(static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < k; ++i) {
        const auto& m = members[order[i]];
        R.row(static_cast<Eigen::Index>(i)) = m.direction.transpose();
        vr(static_cast<Eigen::Index>(i)) = m.v_r;
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(R);
    cod.setThreshold(1e-10);

    VelocityEstimate out;
    out.velocity = cod.solve(vr);
    out.rank = static_cast<int>(cod.rank());
    out.rank_deficient = out.rank < 3;
    out.n_used = static_cast<int>(k);
    return out;
}

double center_radial(const Vec3& velocity, const TrpConfig& center_trp, const Position3D& fused_position) {
    return velocity.dot(los_geometry(center_trp, fused_position).unit_vector);
}

FusedTarget fuse_cluster(const Cluster& cluster, std::span<const TrpConfig> trps, const TrpConfig& center_trp,
                         int k_strongest) {
    FusedTarget t;
    t.position = fuse_position(cluster);
    t.contributing_trps = cluster.distinct_trps();
    t.n_members = cluster.members.size();
    for (const auto& m : cluster.members) t.total_snr += m.gamma;

    std::vector<VelocityMember> rows;
    for (int id : t.contributing_trps) {
        const Measurement* best = nullptr;
        for (const auto& m : cluster.members) {
            if (m.trp_id == id && (!best || m.gamma > best->gamma)) best = &m;
        }
        const TrpConfig& trp = find_trp(trps, id);
        if ((t.position - trp.position).norm() <= 0.0) continue;
        rows.push_back({los_geometry(trp, t.position).unit_vector, best->v_r, best->gamma});
    }
    // A fused position on top of a TRP has no line of sight from it; such a
    // target keeps a zero velocity and is flagged.
    if (rows.empty()) {
        t.rank_deficient = true;
        return t;
    }
    const VelocityEstimate v = reconstruct_velocity(rows, k_strongest);
    t.velocity = v.velocity;
    t.rank_deficient = v.rank_deficient;
    if ((t.position - center_trp.position).norm() > 0.0) {
        t.v_r_center = center_radial(t.velocity, center_trp, t.position);
    } else {
        t.rank_deficient = true;
    }
    return t;
}

std::vector<FusedTarget> fuse_measurements(std::span<const Measurement> measurements, std::span<const TrpConfig> trps,
                                           const TrpConfig& center_trp, const FusionConfig& cfg) {
    std::vector<FusedTarget> out;
    for (const auto& cl : cluster_detections(measurements, cfg.d_3d_m)) {
        if (vote(cl, cfg.vth)) out.push_back(fuse_cluster(cl, trps, center_trp, cfg.k_strongest));
    }
    return out;
}

}  // namespace mtrp
