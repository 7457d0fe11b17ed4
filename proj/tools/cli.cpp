#include "cli.hpp"

#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "mtrp/config.hpp"
#include "mtrp/engine.hpp"
#include "mtrp/errors.hpp"
#include "mtrp/output.hpp"

namespace mtrp::cli {

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

struct RunArgs {
    std::string config;
    std::optional<int> drops;
    std::optional<std::uint64_t> seed;
    std::vector<int> vth;
    std::vector<double> refresh;
    std::optional<std::string> out;
    std::optional<int> workers;
    bool quiet = false;
};

struct OverheadArgs {
    int trps = 4;
    int symbols_per_trp = 1;
    int lsym = 14;
    double tcpi = 0.128;
    std::optional<double> trefresh;
};

int do_run(const RunArgs& a, std::ostream& out, std::ostream& err) {
    ExperimentConfig cfg = load_config(a.config);
    if (a.drops) cfg.campaign.n_drops = *a.drops;
    if (a.seed) cfg.seed = *a.seed;
    if (!a.vth.empty()) cfg.campaign.vth = a.vth;
    if (!a.refresh.empty()) cfg.campaign.t_refresh_s = a.refresh;
    if (a.out) cfg.output.directory = *a.out;
    if (a.workers) cfg.campaign.workers = *a.workers;
    validate(cfg);

    ProgressFn progress;
    if (!a.quiet) {
        progress = [&err](std::size_t done, std::size_t total) {
            if (done == total || done % 10 == 0) err << fmt::format("\r{}/{} drops", done, total) << std::flush;
            if (done == total) err << '\n';
        };
    }
    const CampaignResult r = run_campaign(cfg, progress);
    emit_results(r, cfg.output.directory);

    out << fmt::format("selected TRPs: {}\n", fmt::join(r.selected_trps, ", "));
    out << fmt::format("{:>4} {:>3} {:>8} {:>5} {:>9} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8}\n", "vth", "k", "tx_dBm",
                       "d_v", "refresh", "MDP", "FAP", "h90", "v90", "vel90", "eta_eff");
    auto f = [](const std::optional<double>& v) { return v ? fmt::format("{:.4f}", *v) : std::string("-"); };
    for (const auto& s : r.sweeps) {
        out << fmt::format("{:>4} {:>3} {:>8} {:>5} {:>9} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8.4f}\n", s.point.vth,
                           s.point.k_strongest, s.point.tx_power_dbm, s.point.d_v, s.point.t_refresh_s, f(s.score.mdp),
                           f(s.score.fap), f(s.score.h90), f(s.score.v90), f(s.score.vel90), s.overhead.eta_eff);
    }
    if (!r.failures.empty()) out << fmt::format("{} failed cells (see failures.csv)\n", r.failures.size());
    out << fmt::format("results written to {} in {:.1f} s\n", cfg.output.directory, r.elapsed_s);
    return kOk;
}

int do_overhead(const OverheadArgs& a, std::ostream& out) {
    const double refresh = a.trefresh.value_or(a.tcpi);
    if (a.trps < 0) throw ConfigValidationError("trps", "must be non-negative");
    if (a.symbols_per_trp < 1) throw ConfigValidationError("symbols-per-trp", "must be at least 1");
    const OverheadReport o = sensing_overhead(a.trps * a.symbols_per_trp, a.lsym, a.tcpi, refresh);
    out << fmt::format("l_occ={} l_sym={} t_cpi={} t_refresh={}\n", o.l_occ, o.l_sym, o.t_cpi_s, o.t_refresh_s);
    out << fmt::format("eta_cpi={:.6g}\neta_eff={:.6g}\n", o.eta_cpi, o.eta_eff);
    return kOk;
}

int do_validate(const std::string& path, std::ostream& out) {
    const ExperimentConfig cfg = load_config(path);
    const auto points = expand_sweep(cfg);
    out << fmt::format("{}: ok ({} drops, {} sweep points, {} PRS subcarriers)\n", path, cfg.campaign.n_drops,
                       points.size(), cfg.waveform.prs_subcarrier_count());
    return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multi-TRP monostatic UAV sensing simulator"};
    app.set_version_flag("--version", version_string());
    app.require_subcommand(1);

    RunArgs ra;
    auto* run_cmd = app.add_subcommand("run", "Run a Monte Carlo campaign");
    run_cmd->add_option("--config", ra.config, "Experiment configuration (YAML)")->required();
    run_cmd->add_option("--drops", ra.drops, "Number of drops");
    run_cmd->add_option("--seed", ra.seed, "Base seed");
    run_cmd->add_option("--vth", ra.vth, "Voting thresholds, comma separated")->delimiter(',');
    run_cmd->add_option("--refresh", ra.refresh, "Refresh intervals [s], comma separated")->delimiter(',');
    run_cmd->add_option("--out", ra.out, "Output directory");
    run_cmd->add_option("--workers", ra.workers, "Drop-level worker threads (0 = all)");
    run_cmd->add_flag("--quiet", ra.quiet, "No progress output");

    OverheadArgs oa;
    auto* ov_cmd = app.add_subcommand("overhead", "Sensing overhead calculator");
    ov_cmd->add_option("--trps", oa.trps, "Number of assisting TRPs")->capture_default_str();
    ov_cmd->add_option("--symbols-per-trp", oa.symbols_per_trp, "Sensing symbols per TRP per slot")
        ->capture_default_str();
    ov_cmd->add_option("--lsym", oa.lsym, "OFDM symbols per slot")->capture_default_str();
    ov_cmd->add_option("--tcpi", oa.tcpi, "CPI duration [s]")->capture_default_str();
    ov_cmd->add_option("--trefresh", oa.trefresh, "Refresh interval [s] (default: CPI duration)");

    std::string validate_path;
    auto* val_cmd = app.add_subcommand("validate", "Check a configuration file");
    val_cmd->add_option("--config", validate_path, "Experiment configuration (YAML)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::CallForVersion& e) {
        out << version_string() << '\n';
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    }

    try {
        if (*run_cmd) return do_run(ra, out, err);
        if (*ov_cmd) return do_overhead(oa, out);
        if (*val_cmd) return do_validate(validate_path, out);
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        err << "runtime error: " << e.what() << '\n';
        return kRuntimeError;
    }
    return kConfigError;
}

}  // namespace mtrp::cli
