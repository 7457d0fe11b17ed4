#include "mtrp/output.hpp"

#include <fstream>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <nlohmann/json.hpp>

#include "mtrp/errors.hpp"

#ifndef MTRP_VERSION
#define MTRP_VERSION "0.0.0"
#endif

namespace mtrp {

namespace {

namespace fs = std::filesystem;

std::string opt(const std::optional<double>& v) { return v ? fmt::format("{}", *v) : std::string(); }

nlohmann::json opt_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

class Writer {
public:
    explicit Writer(const fs::path& path) : path_(path), out_(path, std::ios::binary) {
        if (!out_) throw Error("cannot open " + path.string() + " for writing");
    }
    ~Writer() noexcept(false) {
        out_.flush();
        if (!out_ && std::uncaught_exceptions() == 0) throw Error("write failed: " + path_.string());
    }
    template <class... Args>
    void line(fmt::format_string<Args...> f, Args&&... args) {
        out_ << fmt::format(f, std::forward<Args>(args)...) << '\n';
    }
    std::ofstream& stream() { return out_; }

private:
    fs::path path_;
    std::ofstream out_;
};

std::string point_prefix(const SweepPoint& p) {
    return fmt::format("{},{},{},{}", p.vth, p.k_strongest, p.tx_power_dbm, p.d_v);
}

// Per-drop tables do not depend on the refresh interval; keep the first one.
bool first_refresh(const SweepResult& s, const ExperimentConfig& cfg) {
    return s.point.t_refresh_s == cfg.campaign.t_refresh_s.front();
}

std::string join_ids(const std::vector<int>& ids) {
    std::string s;
    for (std::size_t i = 0; i < ids.size(); ++i) s += (i ? ";" : "") + std::to_string(ids[i]);
    return s;
}

}  // namespace

std::string version_string() { return MTRP_VERSION; }

std::string manifest_yaml(const CampaignResult& r) {
    std::string s = "run:\n";
    s += fmt::format("  version: \"{}\"\n", version_string());
    s += fmt::format("  seed: {}\n", r.config.seed);
    s += fmt::format("  n_drops: {}\n", r.config.campaign.n_drops);
    s += fmt::format("  selected_trps: [{}]\n", fmt::join(r.selected_trps, ", "));
    s += fmt::format("  sweep_points: {}\n", r.sweeps.size());
    s += fmt::format("  failed_cells: {}\n", r.failures.size());
    s += fmt::format("  elapsed_s: {:.3f}\n", r.elapsed_s);
    s += "  drop_seeds: derive_seed(seed, [1, drop_index])\n";
    return s + to_yaml(r.config);
}

void emit_results(const CampaignResult& r, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());
    const auto& cfg = r.config;

    {
        Writer w(dir / "manifest.yaml");
        w.stream() << manifest_yaml(r);
    }
    {
        Writer w(dir / "summary.csv");
        w.line("{}", kSummaryColumns);
        for (const auto& s : r.sweeps) {
            w.line("{},{},{},{},{},{},{},{},{},{},{}", point_prefix(s.point), s.point.t_refresh_s, s.n_drops,
                   s.n_failed, opt(s.score.mdp), opt(s.score.fap), opt(s.score.h90), opt(s.score.v90),
                   opt(s.score.vel90), s.overhead.eta_cpi, s.overhead.eta_eff);
        }
    }
    {
        Writer w(dir / "overhead.csv");
        w.line("n_trps,l_occ,l_sym,t_cpi_s,t_refresh_s,eta_cpi,eta_eff");
        for (const auto& o : r.overhead) {
            w.line("{},{},{},{},{},{},{}", r.selected_trps.size(), o.l_occ, o.l_sym, o.t_cpi_s, o.t_refresh_s,
                   o.eta_cpi, o.eta_eff);
        }
    }
    {
        Writer drops(dir / "drops.csv");
        Writer pairs(dir / "pairs.csv");
        Writer fused(dir / "fused.csv");
        drops.line("vth,k_strongest,tx_power,d_v,drop,status,n_truth,n_missed,n_reported,n_ghost");
        pairs.line("vth,k_strongest,tx_power,d_v,drop,truth,fused,horizontal_m,vertical_m,velocity_mps,rank_deficient");
        fused.line("vth,k_strongest,tx_power,d_v,drop,target,x,y,z,vx,vy,vz,v_r_center,trps,total_snr_db,rank_deficient");
        for (const auto& s : r.sweeps) {
            if (!first_refresh(s, cfg)) continue;
            const std::string pre = point_prefix(s.point);
            for (std::size_t i = 0; i < s.drops.size(); ++i) {
                if (!s.drops[i]) {
                    drops.line("{},{},failed,,,,", pre, i);
                    continue;
                }
                const auto& d = *s.drops[i];
                drops.line("{},{},ok,{},{},{},{}", pre, i, d.n_truth, d.n_missed, d.n_reported, d.n_ghost);
                for (const auto& e : d.errors) {
                    pairs.line("{},{},{},{},{},{},{},{}", pre, i, e.truth, e.fused, e.horizontal_m, e.vertical_m,
                               e.velocity_mps, e.rank_deficient ? 1 : 0);
                }
                for (std::size_t t = 0; t < s.fused[i].size(); ++t) {
                    const auto& f = s.fused[i][t];
                    fused.line("{},{},{},{},{},{},{},{},{},{},{},{},{}", pre, i, t, f.position.x(), f.position.y(),
                               f.position.z(), f.velocity.x(), f.velocity.y(), f.velocity.z(), f.v_r_center,
                               join_ids(f.contributing_trps), lin2db(f.total_snr), f.rank_deficient ? 1 : 0);
                }
            }
        }
    }
    {
        Writer w(dir / "cdf.csv");
        w.line("vth,k_strongest,tx_power,d_v,metric,value,probability");
        for (const auto& s : r.sweeps) {
            if (!first_refresh(s, cfg)) continue;
            const std::string pre = point_prefix(s.point);
            const std::pair<const char*, const std::vector<double>*> metrics[] = {
                {"horizontal_m", &s.score.samples.horizontal_m},
                {"vertical_m", &s.score.samples.vertical_m},
                {"velocity_mps", &s.score.samples.velocity_mps}};
            for (const auto& [name, samples] : metrics) {
                for (const auto& [v, p] : empirical_cdf(*samples)) w.line("{},{},{},{}", pre, name, v, p);
            }
        }
    }
    {
        Writer w(dir / "per_trp.csv");
        w.line("tx_power,d_v,trp_id,n_drops,mdp,fap,h90,v90,vel90");
        for (const auto& p : r.per_trp) {
            w.line("{},{},{},{},{},{},{},{},{}", p.phy.tx_power_dbm, p.phy.d_v, p.trp_id, p.n_drops, opt(p.score.mdp),
                   opt(p.score.fap), opt(p.score.h90), opt(p.score.v90), opt(p.score.vel90));
        }
    }
    {
        Writer w(dir / "failures.csv");
        w.line("drop,stage,message");
        for (const auto& f : r.failures) {
            std::string msg = f.message;
            std::replace(msg.begin(), msg.end(), '"', '\'');
            w.line("{},{},\"{}\"", f.drop_index, f.stage, msg);
        }
    }
    {
        nlohmann::ordered_json j;
        j["version"] = version_string();
        j["seed"] = cfg.seed;
        j["n_drops"] = cfg.campaign.n_drops;
        j["selected_trps"] = r.selected_trps;
        j["candidates"] = nlohmann::json::array();
        for (const auto& c : r.candidates) {
            j["candidates"].push_back({{"trp_id", c.trp_id},
                                       {"detection_rate", c.detection_rate},
                                       {"mean_snr_db", c.mean_snr > 0.0 ? nlohmann::json(lin2db(c.mean_snr))
                                                                        : nlohmann::json(nullptr)},
                                       {"azimuth_deg", c.azimuth_deg}});
        }
        j["overhead"] = nlohmann::json::array();
        for (const auto& o : r.overhead) {
            j["overhead"].push_back({{"l_occ", o.l_occ},
                                     {"l_sym", o.l_sym},
                                     {"t_cpi_s", o.t_cpi_s},
                                     {"t_refresh_s", o.t_refresh_s},
                                     {"eta_cpi", o.eta_cpi},
                                     {"eta_eff", o.eta_eff}});
        }
        j["sweeps"] = nlohmann::json::array();
        for (const auto& s : r.sweeps) {
            j["sweeps"].push_back({{"vth", s.point.vth},
                                   {"k_strongest", s.point.k_strongest},
                                   {"tx_power", s.point.tx_power_dbm},
                                   {"d_v", s.point.d_v},
                                   {"t_refresh", s.point.t_refresh_s},
                                   {"n_drops", s.n_drops},
                                   {"n_failed", s.n_failed},
                                   {"mdp", opt_json(s.score.mdp)},
                                   {"fap", opt_json(s.score.fap)},
                                   {"h90", opt_json(s.score.h90)},
                                   {"v90", opt_json(s.score.v90)},
                                   {"vel90", opt_json(s.score.vel90)},
                                   {"n_pairs", s.score.samples.horizontal_m.size()},
                                   {"eta_cpi", s.overhead.eta_cpi},
                                   {"eta_eff", s.overhead.eta_eff}});
        }
        j["per_trp"] = nlohmann::json::array();
        for (const auto& p : r.per_trp) {
            j["per_trp"].push_back({{"trp_id", p.trp_id},
                                    {"tx_power", p.phy.tx_power_dbm},
                                    {"d_v", p.phy.d_v},
                                    {"n_drops", p.n_drops},
                                    {"mdp", opt_json(p.score.mdp)},
                                    {"fap", opt_json(p.score.fap)},
                                    {"h90", opt_json(p.score.h90)},
                                    {"v90", opt_json(p.score.v90)},
                                    {"vel90", opt_json(p.score.vel90)}});
        }
        j["n_failed_cells"] = r.failures.size();
        Writer w(dir / "summary.json");
        w.stream() << j.dump(2) << '\n';
    }

    if (cfg.output.dump_paths) {
        Writer w(dir / "paths.csv");
        w.line("drop,trp_id,source,is_clutter,delay_s,doppler_hz,power_db,aoa_az_deg,aoa_el_deg,doppler_aliased");
        for (const auto& o : r.traces) {
            for (const auto& t : o.paths) {
                const auto& p = t.path;
                w.line("{},{},{},{},{},{},{},{},{},{}", o.drop_index, t.trp_id, p.source, p.is_clutter ? 1 : 0,
                       p.delay_s, p.doppler_hz, lin2db(p.power()), p.aoa.azimuth_deg, p.aoa.elevation_deg,
                       t.doppler_aliased ? 1 : 0);
            }
        }
    }
    if (cfg.output.dump_maps) {
        const fs::path maps = dir / "maps";
        fs::create_directories(maps, ec);
        if (ec) throw Error("cannot create " + maps.string() + ": " + ec.message());
        for (const auto& o : r.traces) {
            for (const auto& t : o.trps) {
                if (!t.map) continue;
                Writer w(maps / fmt::format("drop{:04d}_trp{:02d}.bin", o.drop_index, t.trp_id));
                // Header: magic, n_range, n_doppler (uint64), range bin [m], Doppler bin [Hz] (float64).
                const char magic[8] = {'M', 'T', 'R', 'P', 'M', 'A', 'P', '1'};
                const std::uint64_t dims[2] = {t.map->n_range, t.map->n_doppler};
                const double axes[2] = {t.map->axes.range_bin_m, t.map->axes.doppler_bin_hz};
                auto& s = w.stream();
                s.write(magic, sizeof magic);
                s.write(reinterpret_cast<const char*>(dims), sizeof dims);
                s.write(reinterpret_cast<const char*>(axes), sizeof axes);
                s.write(reinterpret_cast<const char*>(t.map->power.data()),
                        static_cast<std::streamsize>(t.map->power.size() * sizeof(double)));
            }
        }
    }
}

}  // namespace mtrp
