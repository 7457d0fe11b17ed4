#include "mtrp/engine.hpp"

#include <algorithm>
#include <chrono>

#include <omp.h>

#include "mtrp/errors.hpp"

namespace mtrp {

namespace {

PrsConfig phy_waveform(const ExperimentConfig& cfg, const PhyPoint& phy) {
    PrsConfig prs = cfg.waveform;
    prs.tx_power_dbm = phy.tx_power_dbm;
    return prs;
}

ArrayConfig phy_array(const ExperimentConfig& cfg, const PhyPoint& phy) {
    ArrayConfig a = cfg.deployment.array;
    a.d_v = phy.d_v;
    return a;
}

std::vector<TrpConfig> phy_deployment(const ExperimentConfig& cfg, const PhyPoint& phy) {
    const auto& d = cfg.deployment;
    return build_deployment(d.n_sites, d.isd_m, d.trp_height_m, phy_array(cfg, phy), d.boresight_offset_deg,
                            d.downtilt_deg);
}

std::uint64_t tag(Stream s) { return static_cast<std::uint64_t>(s); }

Vec3 region_centroid(const DropConfig& dc) {
    const double az = deg2rad(dc.sector.boresight_deg);
    const double r = 2.0 / 3.0 * dc.sector.radius_m;
    return dc.sector.apex + Vec3(r * std::cos(az), r * std::sin(az), 0.0);
}

int effective_workers(int requested) { return requested > 0 ? requested : std::max(omp_get_max_threads(), 1); }

// Runs body(i) for i in [0, n). With more than one worker the drops run in
// parallel and kernels inside them stay serial.
template <class Body>
void for_each_drop(std::size_t n, int workers, Body&& body) {
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    const int saved = omp_get_max_active_levels();
    omp_set_max_active_levels(1);
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) body(static_cast<std::size_t>(i));
    omp_set_max_active_levels(saved);
}

}  // namespace

std::vector<SweepPoint> expand_sweep(const ExperimentConfig& cfg) {
    std::vector<SweepPoint> out;
    for (int v : cfg.campaign.vth) {
        for (int k : cfg.campaign.k_strongest) {
            for (double p : tx_power_sweep(cfg)) {
                for (double dv : d_v_sweep(cfg)) {
                    for (double t : cfg.campaign.t_refresh_s) out.push_back({v, k, p, dv, t});
                }
            }
        }
    }
    return out;
}

std::uint64_t drop_seed(std::uint64_t base_seed, std::size_t drop_index) {
    return derive_seed(base_seed, Stream::drop, drop_index);
}

DropSimulator::DropSimulator(const ExperimentConfig& cfg, const PhyPoint& phy, std::vector<int> trp_ids)
    : cfg_(cfg),
      prs_(phy_waveform(cfg, phy)),
      deployment_(phy_deployment(cfg, phy)),
      trp_ids_(std::move(trp_ids)),
      grid_(make_prs_grid(prs_)),
      receiver_(prs_, phy_array(cfg, phy), cfg.receiver) {
    std::sort(trp_ids_.begin(), trp_ids_.end());
    for (int id : trp_ids_) find_trp(deployment_, id);
}

const TrpConfig& DropSimulator::center() const { return find_trp(deployment_, cfg_.fusion.center_trp); }

DropConfig DropSimulator::drop_config() const {
    const TrpConfig& serving = find_trp(deployment_, cfg_.fusion.serving_trp);
    const auto& s = cfg_.scenario;
    DropConfig dc;
    dc.n_targets = s.n_targets;
    dc.sector.apex = Vec3(serving.position.x(), serving.position.y(), 0.0);
    dc.sector.boresight_deg = serving.boresight_azimuth_deg;
    dc.sector.half_width_deg = s.region_half_width_deg;
    dc.sector.radius_m = s.region_radius_m;
    dc.min_separation_m = s.min_separation_m;
    dc.altitude_min_m = s.altitude_min_m;
    dc.altitude_max_m = s.altitude_max_m;
    dc.max_speed_mps = s.max_speed_mps;
    dc.rcs = s.rcs;
    for (const auto& t : deployment_) dc.keep_out.push_back(t.position);
    return dc;
}

DropObservation DropSimulator::observe(std::size_t drop_index, bool trace_paths, bool keep_maps) const {
    DropObservation obs = observe_seeded(drop_seed(cfg_.seed, drop_index), trace_paths, keep_maps);
    obs.drop_index = drop_index;
    return obs;
}

DropObservation DropSimulator::observe_seeded(std::uint64_t seed, bool trace_paths, bool keep_maps) const {
    DropObservation obs;
    obs.seed = seed;
    {
        Rng rng(derive_seed(seed, Stream::targets));
        obs.truths = sample_targets(drop_config(), rng);
    }

    const double p_re = tx_power_per_re_w(prs_);
    const double noise_var = cfg_.channel.noise_enabled ? occasion_noise_variance_w(prs_) : 0.0;
    const double doppler_limit = 0.5 / prs_.occasion_period_s;

    for (int id : trp_ids_) {
        const TrpConfig& trp = find_trp(deployment_, id);
        const auto uid = static_cast<std::uint64_t>(id);

        std::vector<PathComponent> paths;
        for (std::size_t q = 0; q < obs.truths.size(); ++q) {
            Rng rng(derive_seed(seed, {tag(Stream::target_paths), uid, static_cast<std::uint64_t>(q)}));
            auto tp = target_paths(trp, obs.truths[q], prs_.carrier_hz, rng, cfg_.channel.multipath,
                                   static_cast<int>(q));
            tp = cull_paths(std::move(tp), cfg_.channel.cull_threshold_db);
            paths.insert(paths.end(), tp.begin(), tp.end());
        }
        {
            Rng rng(derive_seed(seed, {tag(Stream::clutter), uid}));
            auto cp = cull_paths(clutter_paths(trp, cfg_.channel.clutter, rng), cfg_.channel.cull_threshold_db);
            paths.insert(paths.end(), cp.begin(), cp.end());
        }
        if (trace_paths) {
            for (const auto& p : paths) obs.paths.push_back({id, p, std::abs(p.doppler_hz) > doppler_limit});
        }

        std::vector<Complex> symbols;
        {
            Rng rng(derive_seed(seed, {tag(Stream::prs_symbols), uid}));
            symbols = prs_symbols(prs_.prs_subcarrier_count(), static_cast<std::size_t>(prs_.occasions_per_cpi), rng);
        }
        CsiTensor h = synthesize_csi(paths, grid_, trp.array);
        CsiTensor y = received_signal(std::move(h), symbols, p_re, noise_var, derive_seed(seed, {tag(Stream::noise), uid}));
        const CsiTensor g = ls_channel_estimate(std::move(y), symbols, p_re);

        auto out = receiver_.process(trp, g, keep_maps);
        TrpObservation t;
        t.trp_id = id;
        t.detections = std::move(out.detections);
        for (auto& d : t.detections) {
            d.snapshot.clear();
            d.snapshot.shrink_to_fit();
        }
        t.measurements = std::move(out.measurements);
        if (keep_maps) t.map = std::move(out.map);
        obs.trps.push_back(std::move(t));
    }
    return obs;
}

std::vector<FusedTarget> fuse_observation(const DropObservation& obs, const DropSimulator& sim,
                                          const FusionConfig& fusion) {
    std::vector<Measurement> all;
    for (const auto& t : obs.trps) all.insert(all.end(), t.measurements.begin(), t.measurements.end());
    return fuse_measurements(all, sim.deployment(), sim.center(), fusion);
}

DropScore score_single_trp(const DropObservation& obs, const DropSimulator& sim, int trp_id,
                           const ExperimentConfig& cfg) {
    const TrpConfig& trp = find_trp(sim.deployment(), trp_id);
    std::vector<Measurement> own;
    for (const auto& t : obs.trps) {
        if (t.trp_id == trp_id) own = t.measurements;
    }
    const FusionConfig single{cfg.fusion.d_3d_m, 1, 1};
    const auto fused = fuse_measurements(own, sim.deployment(), trp, single);
    return score_drop(fused, obs.truths, trp, cfg.metrics.association_radius_m);
}

DropResult run_drop(std::size_t drop_index, const ExperimentConfig& cfg) {
    const SweepPoint pt = expand_sweep(cfg).front();
    const std::vector<int> ids = cfg.fusion.mode == SelectionMode::fixed ? cfg.fusion.trps : select_assisting_trps(cfg);
    const DropSimulator sim(cfg, pt.phy(), ids);
    DropResult r;
    r.observation = sim.observe(drop_index);
    r.fused = fuse_observation(r.observation, sim, {cfg.fusion.d_3d_m, pt.vth, pt.k_strongest});
    r.score = score_drop(r.fused, r.observation.truths, sim.center(), cfg.metrics.association_radius_m);
    return r;
}

std::vector<int> select_assisting_trps(const ExperimentConfig& cfg, std::vector<TrpCandidate>* candidates_out) {
    const SweepPoint pt = expand_sweep(cfg).front();
    const auto deployment = phy_deployment(cfg, pt.phy());

    // Probe simulator only to get the target region.
    const DropSimulator probe(cfg, pt.phy(), {cfg.fusion.serving_trp});
    const Vec3 centroid = region_centroid(probe.drop_config());

    std::vector<int> facing;
    for (const auto& t : deployment) {
        const Vec3 dir = centroid - t.position;
        const Angles a = global_to_local(t, dir);
        if (t.trp_id == cfg.fusion.serving_trp || (a.azimuth_deg >= cfg.receiver.angle_grid.az_min_deg &&
                                                    a.azimuth_deg <= cfg.receiver.angle_grid.az_max_deg)) {
            facing.push_back(t.trp_id);
        }
    }

    const DropSimulator sim(cfg, pt.phy(), facing);
    const auto n = static_cast<std::size_t>(cfg.fusion.pilot_drops);
    std::vector<DropObservation> pilots(n);
    for_each_drop(n, effective_workers(cfg.campaign.workers), [&](std::size_t i) {
        pilots[i] = sim.observe_seeded(derive_seed(cfg.seed, Stream::pilot, i));
    });

    std::vector<TrpCandidate> cands;
    for (int id : facing) {
        const TrpConfig& trp = find_trp(deployment, id);
        int n_truth = 0, n_hit = 0, n_meas = 0;
        double snr_sum = 0.0;
        for (const auto& obs : pilots) {
            for (const auto& t : obs.trps) {
                if (t.trp_id != id) continue;
                std::vector<Position3D> mp, tp;
                for (const auto& m : t.measurements) mp.push_back(m.position);
                for (const auto& q : obs.truths) tp.push_back(q.position);
                const Association a = associate_truth(mp, tp, cfg.metrics.association_radius_m);
                n_truth += static_cast<int>(tp.size());
                n_hit += static_cast<int>(a.pairs.size());
                for (const auto& p : a.pairs) {
                    snr_sum += t.measurements[p.fused].gamma;
                    ++n_meas;
                }
            }
        }
        TrpCandidate c;
        c.trp_id = id;
        c.detection_rate = n_truth > 0 ? static_cast<double>(n_hit) / n_truth : 0.0;
        c.mean_snr = n_meas > 0 ? snr_sum / n_meas : 0.0;
        const Vec3 dir = centroid - trp.position;
        c.azimuth_deg = rad2deg(std::atan2(dir.y(), dir.x()));
        cands.push_back(c);
    }
    if (candidates_out) *candidates_out = cands;
    return select_trps(cands, cfg.fusion.selection);
}

CampaignResult run_campaign(const ExperimentConfig& cfg, const ProgressFn& progress) {
    validate(cfg);
    const auto t0 = std::chrono::steady_clock::now();
    const int workers = effective_workers(cfg.campaign.workers);

    CampaignResult res;
    res.config = cfg;
    if (cfg.fusion.mode == SelectionMode::fixed) {
        res.selected_trps = cfg.fusion.trps;
        std::sort(res.selected_trps.begin(), res.selected_trps.end());
    } else {
        res.selected_trps = select_assisting_trps(cfg, &res.candidates);
    }

    const int l_occ = static_cast<int>(res.selected_trps.size()) * cfg.overhead.symbols_per_trp;
    for (double t : cfg.campaign.t_refresh_s) {
        res.overhead.push_back(sensing_overhead(l_occ, cfg.waveform.slot_symbols, cfg.waveform.cpi_duration_s(), t));
    }

    const auto points = expand_sweep(cfg);
    std::vector<PhyPoint> phys;
    for (const auto& p : points) {
        if (std::find(phys.begin(), phys.end(), p.phy()) == phys.end()) phys.push_back(p.phy());
    }

    const auto n_drops = static_cast<std::size_t>(cfg.campaign.n_drops);
    const std::size_t total = n_drops * phys.size();
    std::size_t done = 0;
    const bool dumps = cfg.output.dump_paths || cfg.output.dump_maps;

    for (std::size_t phy_index = 0; phy_index < phys.size(); ++phy_index) {
        const PhyPoint& phy = phys[phy_index];
        const DropSimulator sim(cfg, phy, res.selected_trps);

        std::vector<std::optional<DropObservation>> obs(n_drops);
        std::vector<std::string> errors(n_drops);
        const bool trace = dumps && phy_index == 0;
        for_each_drop(n_drops, workers, [&](std::size_t i) {
            try {
                obs[i] = sim.observe(i, trace && cfg.output.dump_paths, trace && cfg.output.dump_maps);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
            if (progress) {
#pragma omp critical(mtrp_progress)
                progress(++done, total);
            }
        });
        for (std::size_t i = 0; i < n_drops; ++i) {
            if (!obs[i]) res.failures.push_back({i, "observe", errors[i]});
        }

        for (std::size_t pi = 0; pi < points.size(); ++pi) {
            const SweepPoint& pt = points[pi];
            if (!(pt.phy() == phy)) continue;
            SweepResult sr;
            sr.point = pt;
            sr.overhead =
                sensing_overhead(l_occ, cfg.waveform.slot_symbols, cfg.waveform.cpi_duration_s(), pt.t_refresh_s);
            sr.drops.resize(n_drops);
            sr.fused.resize(n_drops);
            const FusionConfig fc{cfg.fusion.d_3d_m, pt.vth, pt.k_strongest};
            std::vector<DropScore> ok;
            for (std::size_t i = 0; i < n_drops; ++i) {
                if (!obs[i]) continue;
                try {
                    sr.fused[i] = fuse_observation(*obs[i], sim, fc);
                    sr.drops[i] = score_drop(sr.fused[i], obs[i]->truths, sim.center(),
                                             cfg.metrics.association_radius_m);
                    ok.push_back(*sr.drops[i]);
                } catch (const std::exception& e) {
                    res.failures.push_back({i, "fusion", e.what()});
                }
            }
            sr.n_drops = static_cast<int>(ok.size());
            sr.n_failed = static_cast<int>(n_drops - ok.size());
            sr.score = aggregate(ok, cfg.metrics.exclude_rank_deficient, cfg.metrics.percentile_level);
            res.sweeps.push_back(std::move(sr));
        }

        if (cfg.campaign.per_trp) {
            for (int id : res.selected_trps) {
                std::vector<DropScore> ok;
                for (std::size_t i = 0; i < n_drops; ++i) {
                    if (!obs[i]) continue;
                    try {
                        ok.push_back(score_single_trp(*obs[i], sim, id, cfg));
                    } catch (const std::exception& e) {
                        res.failures.push_back({i, "single TRP " + std::to_string(id), e.what()});
                    }
                }
                PerTrpResult pr;
                pr.phy = phy;
                pr.trp_id = id;
                pr.n_drops = static_cast<int>(ok.size());
                pr.score = aggregate(ok, cfg.metrics.exclude_rank_deficient, cfg.metrics.percentile_level);
                res.per_trp.push_back(std::move(pr));
            }
        }

        if (trace) {
            for (auto& o : obs) {
                if (o) res.traces.push_back(std::move(*o));
            }
        }
    }

    // Sweep results in expand_sweep order regardless of PHY grouping.
    std::stable_sort(res.sweeps.begin(), res.sweeps.end(), [&](const SweepResult& a, const SweepResult& b) {
        auto index = [&](const SweepPoint& p) {
            for (std::size_t i = 0; i < points.size(); ++i) {
                const auto& q = points[i];
                if (q.vth == p.vth && q.k_strongest == p.k_strongest && q.tx_power_dbm == p.tx_power_dbm &&
                    q.d_v == p.d_v && q.t_refresh_s == p.t_refresh_s) {
                    return i;
                }
            }
            return points.size();
        };
        return index(a.point) < index(b.point);
    });
    std::stable_sort(res.failures.begin(), res.failures.end(),
                     [](const CellFailure& a, const CellFailure& b) { return a.drop_index < b.drop_index; });

    res.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

}  // namespace mtrp
