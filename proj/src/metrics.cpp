#include "mtrp/metrics.hpp"

#include <algorithm>
#include <tuple>

#include "mtrp/errors.hpp"

namespace mtrp {

Association associate_truth(std::span<const Position3D> fused, std::span<const Position3D> truths, double radius_m) {
    if (!(radius_m > 0.0)) throw ContractError("association radius must be positive");
    std::vector<TruthPair> candidates;
    for (std::size_t t = 0; t < truths.size(); ++t) {
        for (std::size_t f = 0; f < fused.size(); ++f) {
            const double d = (fused[f] - truths[t]).norm();
            if (d <= radius_m) candidates.push_back({f, t, d});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const TruthPair& a, const TruthPair& b) {
        return std::tie(a.distance_m, a.truth, a.fused) < std::tie(b.distance_m, b.truth, b.fused);
    });

    Association out;
    std::vector<bool> truth_used(truths.size(), false), fused_used(fused.size(), false);
    for (const auto& c : candidates) {
        if (truth_used[c.truth] || fused_used[c.fused]) continue;
        truth_used[c.truth] = fused_used[c.fused] = true;
        out.pairs.push_back(c);
    }
    for (std::size_t t = 0; t < truths.size(); ++t) {
        if (!truth_used[t]) out.missed.push_back(t);
    }
    for (std::size_t f = 0; f < fused.size(); ++f) {
        if (!fused_used[f]) out.ghosts.push_back(f);
    }
    return out;
}

DropScore score_drop(std::span<const FusedTarget> fused, std::span<const TargetTruth> truths,
                     const TrpConfig& center_trp, double radius_m) {
    std::vector<Position3D> fp, tp;
    for (const auto& f : fused) fp.push_back(f.position);
    for (const auto& t : truths) tp.push_back(t.position);
    const Association a = associate_truth(fp, tp, radius_m);

    DropScore s;
    s.n_truth = static_cast<int>(truths.size());
    s.n_reported = static_cast<int>(fused.size());
    s.n_missed = static_cast<int>(a.missed.size());
    s.n_ghost = static_cast<int>(a.ghosts.size());
    for (const auto& p : a.pairs) {
        const auto& f = fused[p.fused];
        const auto& t = truths[p.truth];
        const Vec3 delta = f.position - t.position;
        PairError e;
        e.truth = p.truth;
        e.fused = p.fused;
        e.horizontal_m = std::hypot(delta.x(), delta.y());
        e.vertical_m = std::abs(delta.z());
        const double truth_vr = t.velocity.dot(los_geometry(center_trp, t.position).unit_vector);
        e.velocity_mps = std::abs(f.v_r_center - truth_vr);
        e.rank_deficient = f.rank_deficient;
        s.errors.push_back(e);
    }
    return s;
}

std::optional<double> compute_mdp(std::span<const DropScore> drops) {
    double sum = 0.0;
    int n = 0;
    for (const auto& d : drops) {
        if (d.n_truth < 1) continue;
        sum += static_cast<double>(d.n_missed) / d.n_truth;
        ++n;
    }
    if (n == 0) return std::nullopt;
    return sum / n;
}

std::optional<double> compute_fap(std::span<const DropScore> drops) {
    double sum = 0.0;
    int n = 0;
    for (const auto& d : drops) {
        if (d.n_reported < 1) continue;
        sum += static_cast<double>(d.n_ghost) / d.n_reported;
        ++n;
    }
    if (n == 0) return std::nullopt;
    return sum / n;
}

std::optional<double> percentile(std::vector<double> samples, double q) {
    if (samples.empty()) return std::nullopt;
    if (!(q >= 0.0 && q <= 1.0)) throw ContractError("percentile level must be in [0, 1]");
    std::sort(samples.begin(), samples.end());
    const double pos = q * static_cast<double>(samples.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, samples.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return samples[lo] + frac * (samples[hi] - samples[lo]);
}

ErrorSamples collect_errors(std::span<const DropScore> drops, bool exclude_rank_deficient) {
    ErrorSamples s;
    for (const auto& d : drops) {
        for (const auto& e : d.errors) {
            s.horizontal_m.push_back(e.horizontal_m);
            s.vertical_m.push_back(e.vertical_m);
            if (!(exclude_rank_deficient && e.rank_deficient)) s.velocity_mps.push_back(e.velocity_mps);
        }
    }
    return s;
}

CampaignScore aggregate(std::span<const DropScore> drops, bool exclude_rank_deficient, double level) {
    CampaignScore c;
    c.mdp = compute_mdp(drops);
    c.fap = compute_fap(drops);
    c.samples = collect_errors(drops, exclude_rank_deficient);
    c.h90 = percentile(c.samples.horizontal_m, level);
    c.v90 = percentile(c.samples.vertical_m, level);
    c.vel90 = percentile(c.samples.velocity_mps, level);
    return c;
}

std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> samples) {
    std::sort(samples.begin(), samples.end());
    std::vector<std::pair<double, double>> out;
    out.reserve(samples.size());
    const auto n = static_cast<double>(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) out.emplace_back(samples[i], static_cast<double>(i + 1) / n);
    return out;
}

}  // namespace mtrp
