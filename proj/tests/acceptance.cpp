// Acceptance report: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   acceptance [desk.yaml]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <string>

#include <Eigen/SVD>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "mtrp/config.hpp"
#include "mtrp/engine.hpp"
#include "mtrp/fusion.hpp"
#include "mtrp/metrics.hpp"
#include "scenes.hpp"
#include "support.hpp"

using namespace mtrp;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    fmt::print("{} [{}] {}: {}\n", pass ? "PASS" : "FAIL", id, name, detail);
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

bool same4(double a, double b) { return std::abs(a - b) <= 5e-5 * std::abs(b); }

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Vec3 random_unit(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    return Vec3(g(rng), g(rng), g(rng)).normalized();
}

std::vector<Measurement> random_measurements(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> n_spots(1, 5), n_meas(0, 30), trp(1, 21);
    std::uniform_real_distribution<double> pos(-300.0, 300.0), jitter(-15.0, 15.0), snr_db(-5.0, 40.0);
    std::vector<Vec3> spots(static_cast<std::size_t>(n_spots(rng)));
    for (auto& s : spots) s = Vec3(pos(rng), pos(rng), 100.0 + 0.3 * pos(rng));
    std::uniform_int_distribution<std::size_t> pick(0, spots.size() - 1);
    std::vector<Measurement> ms(static_cast<std::size_t>(n_meas(rng)));
    for (auto& m : ms) {
        m.trp_id = trp(rng);
        m.position = spots[pick(rng)] + Vec3(jitter(rng), jitter(rng), jitter(rng));
        m.gamma = db2lin(snr_db(rng));
    }
    return ms;
}

// Full-size single-TRP scene: 100 MHz, 128 occasions, 8x8 array.
test::PointScene full_scene() {
    test::PointScene s;
    s.trp.position = Position3D(0.0, 0.0, 25.0);
    return s;
}

void overhead() {
    const auto a = sensing_overhead(4, 14, 0.128, 0.128);
    const auto b = sensing_overhead(4, 14, 0.128, 1.0);
    const bool ok = same4(a.eta_eff, 0.285714) && same4(a.eta_cpi, 0.285714) && same4(b.eta_eff, 0.0365714);
    report(1, "overhead", ok, fmt::format("eta(4,14,0.128,0.128)={:.6g} eta(4,14,0.128,1.0)={:.6g}", a.eta_eff,
                                          b.eta_eff));
}

void fixtures() {
    DropScore d1, d2, g;
    d1.n_truth = 5;
    d1.n_missed = 1;
    d2.n_truth = 4;
    d2.n_missed = 0;
    g.n_reported = 8;
    g.n_ghost = 2;
    const std::vector<DropScore> md = {d1, d2}, fa = {g};
    const double mdp = compute_mdp(md).value_or(-1.0);
    const double fap = compute_fap(fa).value_or(-1.0);
    report(2, "MDP/FAP fixtures", std::abs(mdp - 0.1) < 1e-12 && std::abs(fap - 0.25) < 1e-12,
           fmt::format("MDP={} FAP={}", mdp, fap));
}

void voting_trend(const std::filesystem::path& desk) {
    ExperimentConfig cfg = load_config(desk);
    cfg.campaign.vth = {1, 2, 3, 4};
    cfg.campaign.k_strongest = {cfg.campaign.k_strongest.front()};
    cfg.campaign.t_refresh_s = {cfg.campaign.t_refresh_s.front()};
    cfg.campaign.per_trp = false;
    validate(cfg);
    const auto t0 = std::chrono::steady_clock::now();
    const CampaignResult r = run_campaign(cfg);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::vector<double> mdp(4, NAN), fap(4, NAN);
    for (std::size_t v = 0; v < 4; ++v) {
        mdp[v] = r.sweeps[v].score.mdp.value_or(NAN);
        fap[v] = r.sweeps[v].score.fap.value_or(0.0);
    }
    bool dropwise = r.failures.empty();
    for (std::size_t d = 0; d < static_cast<std::size_t>(cfg.campaign.n_drops) && dropwise; ++d) {
        for (std::size_t v = 1; v < 4; ++v) {
            const auto& lo = r.sweeps[v - 1].drops[d];
            const auto& hi = r.sweeps[v].drops[d];
            dropwise = dropwise && lo && hi && hi->n_missed >= lo->n_missed && hi->n_ghost <= lo->n_ghost;
        }
    }
    bool aggregate = true;
    for (std::size_t v = 1; v < 4; ++v) aggregate = aggregate && mdp[v] >= mdp[v - 1] && fap[v] <= fap[v - 1];
    const bool fap_drop = fap[1] <= fap[0] / 5.0;
    const bool mdp_cost = mdp[1] <= mdp[0] + 0.05;
    const bool fast = secs < 300.0;
    report(3, "voting trend", dropwise && aggregate && fap_drop && mdp_cost && fast,
           fmt::format("{} drops, TRPs [{}], MDP {:.4f}/{:.4f}/{:.4f}/{:.4f}, FAP {:.4f}/{:.4f}/{:.4f}/{:.4f}, "
                       "drop-wise {}, {:.1f} s",
                       cfg.campaign.n_drops, fmt::join(r.selected_trps, ","), mdp[0], mdp[1], mdp[2], mdp[3], fap[0],
                       fap[1], fap[2], fap[3], dropwise ? "monotone" : "VIOLATED", secs));
}

void ls_velocity() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> v(-50.0, 50.0), g(1.0, 1e4);
    std::uniform_int_distribution<int> n(3, 6);
    double worst = 0.0;
    int checked = 0;
    while (checked < 1000) {
        const int count = n(rng);
        std::vector<VelocityMember> rows(static_cast<std::size_t>(count));
        const Vec3 truth(v(rng), v(rng), v(rng));
        Eigen::MatrixXd R(count, 3);
        for (int i = 0; i < count; ++i) {
            auto& r = rows[static_cast<std::size_t>(i)];
            r.direction = random_unit(rng);
            r.v_r = truth.dot(r.direction);
            r.gamma = g(rng);
            R.row(i) = r.direction.transpose();
        }
        if (Eigen::JacobiSVD<Eigen::MatrixXd>(R).singularValues()(2) < 0.05) continue;
        worst = std::max(worst, (reconstruct_velocity(rows, count).velocity - truth).norm());
        ++checked;
    }

    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> e3, e4;
    for (int trial = 0; trial < 1000; ++trial) {
        const Vec3 truth(v(rng), v(rng), 0.0);
        std::vector<VelocityMember> rows(4);
        for (std::size_t i = 0; i < 4; ++i) {
            rows[i].direction = random_unit(rng);
            rows[i].v_r = truth.dot(rows[i].direction);
            rows[i].gamma = 100.0 + static_cast<double>(i);
        }
        rows[0].gamma = 1.0;
        rows[0].v_r += noise(rng);
        e3.push_back((reconstruct_velocity(rows, 3).velocity - truth).norm());
        e4.push_back((reconstruct_velocity(rows, 4).velocity - truth).norm());
    }
    const double m3 = median(e3), m4 = median(e4);
    report(4, "LS velocity", worst <= 1e-9 && m3 <= m4 + 0.05,
           fmt::format("max noiseless error {:.2e} m/s over 1000 geometries, median k=3 {:.4f} vs k=4 {:.4f} m/s",
                       worst, m3, m4));
}

void cfar_calibration() {
    const auto scene = full_scene();
    const PrsGrid grid = make_prs_grid(scene.prs);
    const std::size_t K = grid.frequencies_hz.size(), M = grid.occasion_times_s.size();
    const RadarAxes axes = scene.axes();
    std::vector<RangeDopplerMap> maps;
    std::size_t cells = 0;
    for (std::uint64_t i = 0; cells < 1'000'000; ++i) {
        Rng rng(derive_seed(77, Stream::prs_symbols, i));
        const auto symbols = prs_symbols(K, M, rng);
        CsiTensor y = received_signal(CsiTensor(scene.array.size(), K, M), symbols, scene.tx_power_w, 1.0,
                                      derive_seed(77, Stream::noise, i));
        const CsiTensor g = ls_channel_estimate(std::move(y), symbols, scene.tx_power_w);
        maps.push_back(range_doppler_map(g, scene.rx.range_doppler, axes).map);
        cells += maps.back().power.size();
    }
    bool ok = true;
    std::string detail = fmt::format("{} cells from {} noise-only maps ({} looks):", cells, maps.size(),
                                     maps.front().looks);
    for (double pfa : {1e-3, 1e-4}) {
        CfarConfig cfg = scene.rx.cfar;
        cfg.pfa = pfa;
        std::size_t hits = 0;
        for (const auto& m : maps) {
            for (auto h : cfar_cells(m, cfg).hit) hits += h;
        }
        const double rate = static_cast<double>(hits) / static_cast<double>(cells);
        ok = ok && rate >= pfa / 3.0 && rate <= 3.0 * pfa;
        detail += fmt::format(" Pfa {:g} -> {:.3g} ({:.2f}x)", pfa, rate, rate / pfa);
    }
    report(5, "CFAR calibration", ok, detail);
}

void resolution() {
    const auto scene = full_scene();
    const RadarAxes axes = scene.axes();
    const std::size_t range_bin = 250;
    const int doppler_bin = -9;
    const Angles aoa{17.0, 23.0};
    const auto out = scene.observe({scene.on_grid_path(range_bin, doppler_bin, aoa, 1.0)}, 0.0, 5);
    const int i = test::strongest(out.detections);
    if (i < 0) {
        report(6, "resolution", false, "no detection");
        return;
    }
    const auto& d = out.detections[static_cast<std::size_t>(i)];
    const auto& m = out.measurements[static_cast<std::size_t>(i)];
    const double range = static_cast<double>(range_bin) * axes.range_bin_m;
    const Vec3 truth = scene.trp.position + range * local_to_global(scene.trp, aoa);
    const double pos_err = (m.position - truth).norm();
    const double angle_q = range * deg2rad(scene.rx.angle_grid.step_deg) * std::sqrt(0.5);
    const double pos_tol = 0.5 * axes.range_bin_m + angle_q;
    const double v_true = doppler_bin * axes.doppler_bin_hz * axes.wavelength_m / 2.0;
    const double v_err = std::abs(d.radial_velocity_mps - v_true);
    report(6, "resolution", pos_err <= pos_tol && v_err <= 0.146,
           fmt::format("position error {:.3g} m (bound {:.3f} m, range bin {:.4f} m), radial velocity error {:.3g} "
                       "m/s (bound 0.146)",
                       pos_err, pos_tol, axes.range_bin_m, v_err));
}

void clutter_suppression() {
    const auto scene = full_scene();
    const auto target = scene.on_grid_path(300, 12, Angles{8.0, 18.0}, 1.0);
    auto clutter = scene.on_grid_path(120, 0, Angles{-25.0, -6.0}, 1e4);
    clutter.is_clutter = true;
    // Per-element SNR of -30 dB before processing gain.
    const double noise = 1e3;
    const auto clean = scene.observe({target}, noise, 9);
    const auto dirty = scene.observe({target, clutter}, noise, 9);
    const int a = test::detection_at(clean.detections, 300, 12);
    const int b = test::detection_at(dirty.detections, 300, 12);
    if (a < 0 || b < 0) {
        report(7, "clutter suppression", false, "target not detected");
        return;
    }
    const double s0 = lin2db(clean.detections[static_cast<std::size_t>(a)].snr_linear);
    const double s1 = lin2db(dirty.detections[static_cast<std::size_t>(b)].snr_linear);
    report(7, "clutter suppression", std::abs(s1 - s0) < 1.0,
           fmt::format("target SNR {:.2f} dB alone, {:.2f} dB with clutter 40 dB stronger (delta {:.3g} dB)", s0, s1,
                       s1 - s0));
}

void properties() {
    std::mt19937_64 rng(99);
    int cluster_bad = 0, vote_bad = 0, hull_bad = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto ms = random_measurements(rng);
        const auto clusters = cluster_detections(ms, 20.0);
        std::vector<int> seen(ms.size(), 0);
        for (const auto& cl : clusters) {
            for (std::size_t j = 0; j < cl.members.size(); ++j) {
                ++seen[cl.member_indices[j]];
                if ((cl.members[j].position - cl.centroid).norm() > 20.0 + 1e-9) ++cluster_bad;
            }
            for (int v = 2; v <= 5; ++v) {
                if (vote(cl, v) && !vote(cl, v - 1)) ++vote_bad;
            }
            const Vec3 p = fuse_position(cl);
            for (int k = 0; k < 16; ++k) {
                const Vec3 u = random_unit(rng);
                double hi = -1e300;
                for (const auto& m : cl.members) hi = std::max(hi, u.dot(m.position));
                if (u.dot(p) > hi + 1e-9) ++hull_bad;
            }
        }
        for (int s : seen) cluster_bad += s != 1;
    }

    auto cfg = test::tiny_config();
    cfg.campaign.n_drops = 4;
    cfg.campaign.workers = 1;
    const auto one = run_campaign(cfg);
    cfg.campaign.workers = 3;
    const auto three = run_campaign(cfg);
    bool same = one.sweeps.size() == three.sweeps.size();
    for (std::size_t s = 0; same && s < one.sweeps.size(); ++s) {
        const auto& x = one.sweeps[s];
        const auto& y = three.sweeps[s];
        same = x.score.mdp == y.score.mdp && x.score.fap == y.score.fap &&
               x.score.samples.horizontal_m == y.score.samples.horizontal_m &&
               x.score.samples.velocity_mps == y.score.samples.velocity_mps;
        for (std::size_t d = 0; same && d < x.fused.size(); ++d) {
            same = x.fused[d].size() == y.fused[d].size();
            for (std::size_t t = 0; same && t < x.fused[d].size(); ++t) {
                same = x.fused[d][t].position == y.fused[d][t].position &&
                       x.fused[d][t].velocity == y.fused[d][t].velocity;
            }
        }
    }
    report(8, "property suites", cluster_bad == 0 && vote_bad == 0 && hull_bad == 0 && same,
           fmt::format("1000 random inputs: {} clustering, {} voting, {} hull violations; workers 1 vs 3 {}",
                       cluster_bad, vote_bad, hull_bad, same ? "identical" : "DIFFER"));
}

}  // namespace

int main(int argc, char** argv) {
    const std::filesystem::path desk =
        argc > 1 ? std::filesystem::path(argv[1]) : test::source_dir() / "configs" / "desk.yaml";
    try {
        overhead();
        fixtures();
        voting_trend(desk);
        ls_velocity();
        cfar_calibration();
        resolution();
        clutter_suppression();
        properties();
    } catch (const std::exception& e) {
        fmt::print("FAIL [-] aborted: {}\n", e.what());
        return 2;
    }
    fmt::print("{} criteria failed\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
