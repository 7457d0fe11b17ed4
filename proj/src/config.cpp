#include "mtrp/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "mtrp/errors.hpp"

namespace mtrp {

namespace {

// Reads one YAML mapping, remembering which keys were consumed so leftovers
// can be reported as unknown.
class Section {
public:
    Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
        if (node_ && !node_.IsNull() && !node_.IsMap()) throw ConfigValidationError(name(), "expected a mapping");
    }

    template <class T>
    void get(const std::string& key, T& out) {
        seen_.insert(key);
        if (!node_ || node_.IsNull()) return;
        const YAML::Node v = node_[key];
        if (!v || v.IsNull()) return;
        try {
            out = v.as<T>();
        } catch (const YAML::Exception&) {
            throw ConfigValidationError(field(key), "value has the wrong type");
        }
    }

    void get_window(const std::string& key, WindowType& out) {
        std::string s = to_string(out);
        get(key, s);
        try {
            out = parse_window(s);
        } catch (const ConfigError&) {
            throw ConfigValidationError(field(key), "unknown window '" + s + "'");
        }
    }

    Section sub(const std::string& key) {
        seen_.insert(key);
        const YAML::Node v = (node_ && node_.IsMap()) ? node_[key] : YAML::Node();
        return Section(v, field(key));
    }

    void ignore(const std::string& key) { seen_.insert(key); }

    void finish() const {
        if (!node_ || !node_.IsMap()) return;
        for (const auto& kv : node_) {
            const auto key = kv.first.as<std::string>();
            if (!seen_.contains(key)) throw ConfigValidationError(field(key), "unknown key");
        }
    }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

private:
    std::string name() const { return path_.empty() ? "<root>" : path_; }

    YAML::Node node_;
    std::string path_;
    std::set<std::string> seen_;
};

void read_array(Section s, ArrayConfig& a) {
    s.get("rows", a.n_rows);
    s.get("cols", a.n_cols);
    s.get("d_h", a.d_h);
    s.get("d_v", a.d_v);
    Section e = s.sub("element");
    e.get("max_gain_dbi", a.element.max_gain_dbi);
    e.get("hpbw_deg", a.element.hpbw_deg);
    e.get("front_to_back_db", a.element.front_to_back_db);
    e.get("side_lobe_db", a.element.side_lobe_db);
    e.finish();
    s.finish();
}

void require(bool ok, const std::string& field, const std::string& message) {
    if (!ok) throw ConfigValidationError(field, message);
}

}  // namespace

std::vector<double> tx_power_sweep(const ExperimentConfig& cfg) {
    return cfg.campaign.tx_power_dbm.empty() ? std::vector<double>{cfg.waveform.tx_power_dbm} : cfg.campaign.tx_power_dbm;
}

std::vector<double> d_v_sweep(const ExperimentConfig& cfg) {
    return cfg.campaign.d_v.empty() ? std::vector<double>{cfg.deployment.array.d_v} : cfg.campaign.d_v;
}

std::string to_string(SelectionMode mode) { return mode == SelectionMode::fixed ? "fixed" : "auto"; }

ExperimentConfig parse_config(const std::string& yaml_text) {
    YAML::Node root;
    try {
        root = YAML::Load(yaml_text);
    } catch (const YAML::Exception& e) {
        throw ConfigParseError(std::string("YAML parse error: ") + e.what());
    }
    ExperimentConfig c;
    Section r(root, "");
    r.ignore("run");
    r.get("seed", c.seed);

    {
        Section s = r.sub("deployment");
        s.get("n_sites", c.deployment.n_sites);
        s.get("isd_m", c.deployment.isd_m);
        s.get("trp_height_m", c.deployment.trp_height_m);
        s.get("boresight_offset_deg", c.deployment.boresight_offset_deg);
        s.get("downtilt_deg", c.deployment.downtilt_deg);
        read_array(s.sub("array"), c.deployment.array);
        s.finish();
    }
    {
        Section s = r.sub("waveform");
        auto& w = c.waveform;
        s.get("carrier_hz", w.carrier_hz);
        s.get("bandwidth_hz", w.bandwidth_hz);
        s.get("subcarrier_spacing_hz", w.subcarrier_spacing_hz);
        s.get("n_subcarriers", w.n_subcarriers);
        s.get("comb_size", w.comb_size);
        s.get("comb_offset", w.comb_offset);
        s.get("symbols_per_occasion", w.symbols_per_occasion);
        s.get("occasion_period_s", w.occasion_period_s);
        s.get("occasions_per_cpi", w.occasions_per_cpi);
        s.get("tx_power_dbm", w.tx_power_dbm);
        s.get("noise_figure_db", w.noise_figure_db);
        s.get("slot_symbols", w.slot_symbols);
        s.finish();
    }
    {
        Section s = r.sub("channel");
        s.get("cull_threshold_db", c.channel.cull_threshold_db);
        s.get("noise", c.channel.noise_enabled);
        Section m = s.sub("multipath");
        auto& mp = c.channel.multipath;
        m.get("paths_per_target", mp.paths_per_target);
        m.get("max_excess_delay_s", mp.max_excess_delay_s);
        m.get("power_step_db", mp.power_step_db);
        m.get("angle_spread_deg", mp.angle_spread_deg);
        m.finish();
        Section k = s.sub("clutter");
        auto& cl = c.channel.clutter;
        k.get("enabled", cl.enabled);
        k.get("n_reference_points", cl.n_reference_points);
        k.get("radius_m", cl.radius_m);
        k.get("min_radius_m", cl.min_radius_m);
        k.get("half_width_deg", cl.half_width_deg);
        k.get("height_m", cl.height_m);
        k.get("pathloss_exponent", cl.pathloss_exponent);
        k.get("reference_loss_db", cl.reference_loss_db);
        k.get("shadow_fading_std_db", cl.shadow_fading_std_db);
        k.finish();
        s.finish();
    }
    {
        Section s = r.sub("receiver");
        auto& rc = c.receiver;
        s.get("range_fft_size", rc.range_doppler.range_fft_size);
        s.get_window("range_window", rc.range_doppler.range_window);
        s.get_window("doppler_window", rc.range_doppler.doppler_window);
        s.get("mean_subtraction", rc.range_doppler.mean_subtraction);
        Section f = s.sub("cfar");
        f.get("guard_range", rc.cfar.guard_range);
        f.get("guard_doppler", rc.cfar.guard_doppler);
        f.get("train_range", rc.cfar.train_range);
        f.get("train_doppler", rc.cfar.train_doppler);
        f.get("pfa", rc.cfar.pfa);
        f.get("integration_correction", rc.cfar.integration_correction);
        f.get("dynamic_range_db", rc.cfar.dynamic_range_db);
        f.get("split_peaks", rc.cfar.split_peaks);
        f.get("split_prominence_db", rc.cfar.split_prominence_db);
        f.finish();
        Section a = s.sub("angle_grid");
        a.get("az_min_deg", rc.angle_grid.az_min_deg);
        a.get("az_max_deg", rc.angle_grid.az_max_deg);
        a.get("el_min_deg", rc.angle_grid.el_min_deg);
        a.get("el_max_deg", rc.angle_grid.el_max_deg);
        a.get("step_deg", rc.angle_grid.step_deg);
        a.finish();
        s.finish();
    }
    {
        Section s = r.sub("scenario");
        auto& sc = c.scenario;
        s.get("n_targets", sc.n_targets);
        s.get("region_radius_m", sc.region_radius_m);
        s.get("region_half_width_deg", sc.region_half_width_deg);
        s.get("min_separation_m", sc.min_separation_m);
        s.get("altitude_min_m", sc.altitude_min_m);
        s.get("altitude_max_m", sc.altitude_max_m);
        s.get("max_speed_mps", sc.max_speed_mps);
        s.get("rcs_mean_dbsm", sc.rcs.mean_dbsm);
        s.get("rcs_std_db", sc.rcs.fluctuation_std_db);
        s.finish();
    }
    {
        Section s = r.sub("fusion");
        auto& f = c.fusion;
        s.get("d_3d_m", f.d_3d_m);
        s.get("serving_trp", f.serving_trp);
        s.get("center_trp", f.center_trp);
        std::string mode = to_string(f.mode);
        s.get("selection", mode);
        if (mode == "fixed") {
            f.mode = SelectionMode::fixed;
        } else if (mode == "auto") {
            f.mode = SelectionMode::automatic;
        } else {
            throw ConfigValidationError("fusion.selection", "expected 'fixed' or 'auto'");
        }
        s.get("trps", f.trps);
        s.get("pilot_drops", f.pilot_drops);
        s.get("max_trps", f.selection.max_count);
        s.get("snr_threshold_db", f.selection.snr_threshold_db);
        s.get("min_detection_rate", f.selection.min_detection_rate);
        s.finish();
        f.selection.serving_trp_id = f.serving_trp;
    }
    {
        Section s = r.sub("metrics");
        s.get("association_radius_m", c.metrics.association_radius_m);
        s.get("percentile_level", c.metrics.percentile_level);
        s.get("exclude_rank_deficient", c.metrics.exclude_rank_deficient);
        s.finish();
    }
    {
        Section s = r.sub("overhead");
        s.get("symbols_per_trp", c.overhead.symbols_per_trp);
        s.finish();
    }
    {
        Section s = r.sub("campaign");
        auto& k = c.campaign;
        s.get("n_drops", k.n_drops);
        s.get("workers", k.workers);
        s.get("vth", k.vth);
        s.get("k_strongest", k.k_strongest);
        s.get("tx_power_dbm", k.tx_power_dbm);
        s.get("d_v", k.d_v);
        s.get("t_refresh_s", k.t_refresh_s);
        s.get("per_trp", k.per_trp);
        s.finish();
    }
    {
        Section s = r.sub("output");
        s.get("directory", c.output.directory);
        s.get("dump_paths", c.output.dump_paths);
        s.get("dump_maps", c.output.dump_maps);
        s.finish();
    }
    r.finish();
    validate(c);
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigFileMissing("cannot open configuration file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void validate(const ExperimentConfig& c) {
    const auto& d = c.deployment;
    require(d.n_sites == 1 || d.n_sites == 7, "deployment.n_sites", "must be 1 or 7");
    require(d.isd_m > 0.0, "deployment.isd_m", "must be positive");
    require(d.trp_height_m >= 0.0, "deployment.trp_height_m", "must be non-negative");
    require(d.array.n_rows >= 1, "deployment.array.rows", "must be at least 1");
    require(d.array.n_cols >= 1, "deployment.array.cols", "must be at least 1");
    require(d.array.d_h > 0.0, "deployment.array.d_h", "must be positive");
    require(d.array.d_v > 0.0, "deployment.array.d_v", "must be positive");
    require(d.array.element.hpbw_deg > 0.0, "deployment.array.element.hpbw_deg", "must be positive");

    const auto& w = c.waveform;
    require(w.carrier_hz > 0.0, "waveform.carrier_hz", "must be positive");
    require(w.subcarrier_spacing_hz > 0.0, "waveform.subcarrier_spacing_hz", "must be positive");
    require(w.bandwidth_hz >= 12.0 * w.subcarrier_spacing_hz, "waveform.bandwidth_hz",
            "must hold at least one resource block");
    require(w.n_subcarriers >= 0, "waveform.n_subcarriers", "must be non-negative");
    require(w.comb_size >= 1, "waveform.comb_size", "must be at least 1");
    require(w.comb_offset >= 0 && w.comb_offset < w.comb_size, "waveform.comb_offset", "must be in [0, comb_size)");
    require(w.slot_symbols >= 1, "waveform.slot_symbols", "must be at least 1");
    require(w.symbols_per_occasion >= 1 && w.symbols_per_occasion <= w.slot_symbols, "waveform.symbols_per_occasion",
            "must be in [1, slot_symbols]");
    require(w.occasion_period_s > 0.0, "waveform.occasion_period_s", "must be positive");
    require(w.occasions_per_cpi >= 1, "waveform.occasions_per_cpi", "must be at least 1");

    const auto& ch = c.channel;
    require(ch.cull_threshold_db > 0.0, "channel.cull_threshold_db", "must be positive");
    require(ch.multipath.paths_per_target >= 1, "channel.multipath.paths_per_target", "must be at least 1");
    require(ch.multipath.max_excess_delay_s >= 0.0, "channel.multipath.max_excess_delay_s", "must be non-negative");
    require(ch.multipath.angle_spread_deg >= 0.0, "channel.multipath.angle_spread_deg", "must be non-negative");
    require(ch.clutter.n_reference_points >= 0, "channel.clutter.n_reference_points", "must be non-negative");
    require(ch.clutter.min_radius_m >= 0.0, "channel.clutter.min_radius_m", "must be non-negative");
    require(ch.clutter.radius_m >= ch.clutter.min_radius_m, "channel.clutter.radius_m", "must be >= min_radius_m");
    require(ch.clutter.half_width_deg > 0.0 && ch.clutter.half_width_deg <= 180.0, "channel.clutter.half_width_deg",
            "must be in (0, 180]");
    require(ch.clutter.pathloss_exponent > 0.0, "channel.clutter.pathloss_exponent", "must be positive");
    require(ch.clutter.shadow_fading_std_db >= 0.0, "channel.clutter.shadow_fading_std_db", "must be non-negative");

    const auto& rc = c.receiver;
    require(rc.range_doppler.range_fft_size >= w.prs_subcarrier_count(), "receiver.range_fft_size",
            "must be at least the number of PRS subcarriers (" + std::to_string(w.prs_subcarrier_count()) + ")");
    require(rc.cfar.guard_range >= 0, "receiver.cfar.guard_range", "must be non-negative");
    require(rc.cfar.guard_doppler >= 0, "receiver.cfar.guard_doppler", "must be non-negative");
    require(rc.cfar.train_range >= 0, "receiver.cfar.train_range", "must be non-negative");
    require(rc.cfar.train_doppler >= 0, "receiver.cfar.train_doppler", "must be non-negative");
    require(rc.cfar.train_range + rc.cfar.train_doppler >= 1, "receiver.cfar.train_range",
            "at least one training cell is needed");
    require(2 * (rc.cfar.guard_doppler + rc.cfar.train_doppler) + 1 <= w.occasions_per_cpi,
            "receiver.cfar.train_doppler", "window is wider than the Doppler axis");
    require(2 * static_cast<std::size_t>(rc.cfar.guard_range + rc.cfar.train_range) + 1 <=
                rc.range_doppler.range_fft_size,
            "receiver.cfar.train_range", "window is wider than the range axis");
    require(rc.cfar.pfa > 0.0 && rc.cfar.pfa < 1.0, "receiver.cfar.pfa", "must be in (0, 1)");
    require(rc.cfar.dynamic_range_db > 0.0, "receiver.cfar.dynamic_range_db", "must be positive");
    require(rc.cfar.split_prominence_db >= 0.0, "receiver.cfar.split_prominence_db", "must be non-negative");
    require(rc.angle_grid.step_deg > 0.0, "receiver.angle_grid.step_deg", "must be positive");
    require(rc.angle_grid.az_min_deg <= rc.angle_grid.az_max_deg, "receiver.angle_grid.az_max_deg",
            "must be >= az_min_deg");
    require(rc.angle_grid.el_min_deg <= rc.angle_grid.el_max_deg, "receiver.angle_grid.el_max_deg",
            "must be >= el_min_deg");
    require(rc.angle_grid.el_min_deg >= -90.0 && rc.angle_grid.el_max_deg <= 90.0, "receiver.angle_grid.el_min_deg",
            "elevation must stay within [-90, 90]");

    const auto& s = c.scenario;
    require(s.n_targets >= 0, "scenario.n_targets", "must be non-negative");
    require(s.region_radius_m > 0.0, "scenario.region_radius_m", "must be positive");
    require(s.region_half_width_deg > 0.0 && s.region_half_width_deg <= 180.0, "scenario.region_half_width_deg",
            "must be in (0, 180]");
    require(s.min_separation_m >= 0.0, "scenario.min_separation_m", "must be non-negative");
    require(s.altitude_min_m >= 0.0, "scenario.altitude_min_m", "must be non-negative");
    require(s.altitude_max_m >= s.altitude_min_m, "scenario.altitude_max_m", "must be >= altitude_min_m");
    require(s.max_speed_mps >= 0.0, "scenario.max_speed_mps", "must be non-negative");
    require(s.rcs.fluctuation_std_db >= 0.0, "scenario.rcs_std_db", "must be non-negative");

    const int n_trps = 3 * d.n_sites;
    auto valid_id = [&](int id) { return id >= 1 && id <= n_trps; };
    const auto& f = c.fusion;
    require(f.d_3d_m > 0.0, "fusion.d_3d_m", "must be positive");
    require(valid_id(f.serving_trp), "fusion.serving_trp", "no such TRP in the deployment");
    require(valid_id(f.center_trp), "fusion.center_trp", "no such TRP in the deployment");
    require(f.pilot_drops >= 1, "fusion.pilot_drops", "must be at least 1");
    require(f.selection.max_count >= 1, "fusion.max_trps", "must be at least 1");
    require(f.selection.min_detection_rate >= 0.0 && f.selection.min_detection_rate <= 1.0,
            "fusion.min_detection_rate", "must be in [0, 1]");
    if (f.mode == SelectionMode::fixed) {
        require(!f.trps.empty(), "fusion.trps", "must list at least one TRP");
        std::set<int> unique;
        for (int id : f.trps) {
            require(valid_id(id), "fusion.trps", "TRP " + std::to_string(id) + " is not in the deployment");
            require(unique.insert(id).second, "fusion.trps", "TRP " + std::to_string(id) + " listed twice");
        }
    }

    require(c.metrics.association_radius_m > 0.0, "metrics.association_radius_m", "must be positive");
    require(c.metrics.percentile_level >= 0.0 && c.metrics.percentile_level <= 1.0, "metrics.percentile_level",
            "must be in [0, 1]");

    require(c.overhead.symbols_per_trp >= 1, "overhead.symbols_per_trp", "must be at least 1");
    const int max_trps = f.mode == SelectionMode::fixed ? static_cast<int>(f.trps.size()) : f.selection.max_count;
    require(max_trps * c.overhead.symbols_per_trp <= w.slot_symbols, "overhead.symbols_per_trp",
            "sensing symbols exceed the slot");

    const auto& k = c.campaign;
    require(k.n_drops >= 1, "campaign.n_drops", "must be at least 1");
    require(k.workers >= 0, "campaign.workers", "must be non-negative");
    require(!k.vth.empty(), "campaign.vth", "must not be empty");
    for (int v : k.vth) require(v >= 1, "campaign.vth", "every threshold must be at least 1");
    require(!k.k_strongest.empty(), "campaign.k_strongest", "must not be empty");
    for (int v : k.k_strongest) require(v >= 1, "campaign.k_strongest", "every value must be at least 1");
    for (double v : k.d_v) require(v > 0.0, "campaign.d_v", "every spacing must be positive");
    require(!k.t_refresh_s.empty(), "campaign.t_refresh_s", "must not be empty");
    for (double t : k.t_refresh_s) {
        require(t >= w.cpi_duration_s(), "campaign.t_refresh_s", "refresh interval shorter than the CPI");
    }

    require(!c.output.directory.empty(), "output.directory", "must not be empty");
}

std::string to_yaml(const ExperimentConfig& c) {
    YAML::Emitter e;
    e.SetDoublePrecision(17);
    e << YAML::BeginMap;
    e << YAML::Key << "seed" << YAML::Value << c.seed;

    e << YAML::Key << "deployment" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "n_sites" << YAML::Value << c.deployment.n_sites;
    e << YAML::Key << "isd_m" << YAML::Value << c.deployment.isd_m;
    e << YAML::Key << "trp_height_m" << YAML::Value << c.deployment.trp_height_m;
    e << YAML::Key << "boresight_offset_deg" << YAML::Value << c.deployment.boresight_offset_deg;
    e << YAML::Key << "downtilt_deg" << YAML::Value << c.deployment.downtilt_deg;
    const auto& a = c.deployment.array;
    e << YAML::Key << "array" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "rows" << YAML::Value << a.n_rows;
    e << YAML::Key << "cols" << YAML::Value << a.n_cols;
    e << YAML::Key << "d_h" << YAML::Value << a.d_h;
    e << YAML::Key << "d_v" << YAML::Value << a.d_v;
    e << YAML::Key << "element" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "max_gain_dbi" << YAML::Value << a.element.max_gain_dbi;
    e << YAML::Key << "hpbw_deg" << YAML::Value << a.element.hpbw_deg;
    e << YAML::Key << "front_to_back_db" << YAML::Value << a.element.front_to_back_db;
    e << YAML::Key << "side_lobe_db" << YAML::Value << a.element.side_lobe_db;
    e << YAML::EndMap << YAML::EndMap << YAML::EndMap;

    const auto& w = c.waveform;
    e << YAML::Key << "waveform" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "carrier_hz" << YAML::Value << w.carrier_hz;
    e << YAML::Key << "bandwidth_hz" << YAML::Value << w.bandwidth_hz;
    e << YAML::Key << "subcarrier_spacing_hz" << YAML::Value << w.subcarrier_spacing_hz;
    e << YAML::Key << "n_subcarriers" << YAML::Value << w.n_subcarriers;
    e << YAML::Key << "comb_size" << YAML::Value << w.comb_size;
    e << YAML::Key << "comb_offset" << YAML::Value << w.comb_offset;
    e << YAML::Key << "symbols_per_occasion" << YAML::Value << w.symbols_per_occasion;
    e << YAML::Key << "occasion_period_s" << YAML::Value << w.occasion_period_s;
    e << YAML::Key << "occasions_per_cpi" << YAML::Value << w.occasions_per_cpi;
    e << YAML::Key << "tx_power_dbm" << YAML::Value << w.tx_power_dbm;
    e << YAML::Key << "noise_figure_db" << YAML::Value << w.noise_figure_db;
    e << YAML::Key << "slot_symbols" << YAML::Value << w.slot_symbols;
    e << YAML::EndMap;

    const auto& ch = c.channel;
    e << YAML::Key << "channel" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "cull_threshold_db" << YAML::Value << ch.cull_threshold_db;
    e << YAML::Key << "noise" << YAML::Value << ch.noise_enabled;
    e << YAML::Key << "multipath" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "paths_per_target" << YAML::Value << ch.multipath.paths_per_target;
    e << YAML::Key << "max_excess_delay_s" << YAML::Value << ch.multipath.max_excess_delay_s;
    e << YAML::Key << "power_step_db" << YAML::Value << ch.multipath.power_step_db;
    e << YAML::Key << "angle_spread_deg" << YAML::Value << ch.multipath.angle_spread_deg;
    e << YAML::EndMap;
    e << YAML::Key << "clutter" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "enabled" << YAML::Value << ch.clutter.enabled;
    e << YAML::Key << "n_reference_points" << YAML::Value << ch.clutter.n_reference_points;
    e << YAML::Key << "radius_m" << YAML::Value << ch.clutter.radius_m;
    e << YAML::Key << "min_radius_m" << YAML::Value << ch.clutter.min_radius_m;
    e << YAML::Key << "half_width_deg" << YAML::Value << ch.clutter.half_width_deg;
    e << YAML::Key << "height_m" << YAML::Value << ch.clutter.height_m;
    e << YAML::Key << "pathloss_exponent" << YAML::Value << ch.clutter.pathloss_exponent;
    e << YAML::Key << "reference_loss_db" << YAML::Value << ch.clutter.reference_loss_db;
    e << YAML::Key << "shadow_fading_std_db" << YAML::Value << ch.clutter.shadow_fading_std_db;
    e << YAML::EndMap << YAML::EndMap;

    const auto& rc = c.receiver;
    e << YAML::Key << "receiver" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "range_fft_size" << YAML::Value << rc.range_doppler.range_fft_size;
    e << YAML::Key << "range_window" << YAML::Value << to_string(rc.range_doppler.range_window);
    e << YAML::Key << "doppler_window" << YAML::Value << to_string(rc.range_doppler.doppler_window);
    e << YAML::Key << "mean_subtraction" << YAML::Value << rc.range_doppler.mean_subtraction;
    e << YAML::Key << "cfar" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "guard_range" << YAML::Value << rc.cfar.guard_range;
    e << YAML::Key << "guard_doppler" << YAML::Value << rc.cfar.guard_doppler;
    e << YAML::Key << "train_range" << YAML::Value << rc.cfar.train_range;
    e << YAML::Key << "train_doppler" << YAML::Value << rc.cfar.train_doppler;
    e << YAML::Key << "pfa" << YAML::Value << rc.cfar.pfa;
    e << YAML::Key << "integration_correction" << YAML::Value << rc.cfar.integration_correction;
    e << YAML::Key << "dynamic_range_db" << YAML::Value << rc.cfar.dynamic_range_db;
    e << YAML::Key << "split_peaks" << YAML::Value << rc.cfar.split_peaks;
    e << YAML::Key << "split_prominence_db" << YAML::Value << rc.cfar.split_prominence_db;
    e << YAML::EndMap;
    e << YAML::Key << "angle_grid" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "az_min_deg" << YAML::Value << rc.angle_grid.az_min_deg;
    e << YAML::Key << "az_max_deg" << YAML::Value << rc.angle_grid.az_max_deg;
    e << YAML::Key << "el_min_deg" << YAML::Value << rc.angle_grid.el_min_deg;
    e << YAML::Key << "el_max_deg" << YAML::Value << rc.angle_grid.el_max_deg;
    e << YAML::Key << "step_deg" << YAML::Value << rc.angle_grid.step_deg;
    e << YAML::EndMap << YAML::EndMap;

    const auto& s = c.scenario;
    e << YAML::Key << "scenario" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "n_targets" << YAML::Value << s.n_targets;
    e << YAML::Key << "region_radius_m" << YAML::Value << s.region_radius_m;
    e << YAML::Key << "region_half_width_deg" << YAML::Value << s.region_half_width_deg;
    e << YAML::Key << "min_separation_m" << YAML::Value << s.min_separation_m;
    e << YAML::Key << "altitude_min_m" << YAML::Value << s.altitude_min_m;
    e << YAML::Key << "altitude_max_m" << YAML::Value << s.altitude_max_m;
    e << YAML::Key << "max_speed_mps" << YAML::Value << s.max_speed_mps;
    e << YAML::Key << "rcs_mean_dbsm" << YAML::Value << s.rcs.mean_dbsm;
    e << YAML::Key << "rcs_std_db" << YAML::Value << s.rcs.fluctuation_std_db;
    e << YAML::EndMap;

    const auto& f = c.fusion;
    e << YAML::Key << "fusion" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "d_3d_m" << YAML::Value << f.d_3d_m;
    e << YAML::Key << "serving_trp" << YAML::Value << f.serving_trp;
    e << YAML::Key << "center_trp" << YAML::Value << f.center_trp;
    e << YAML::Key << "selection" << YAML::Value << to_string(f.mode);
    e << YAML::Key << "trps" << YAML::Value << YAML::Flow << f.trps;
    e << YAML::Key << "pilot_drops" << YAML::Value << f.pilot_drops;
    e << YAML::Key << "max_trps" << YAML::Value << f.selection.max_count;
    e << YAML::Key << "snr_threshold_db" << YAML::Value << f.selection.snr_threshold_db;
    e << YAML::Key << "min_detection_rate" << YAML::Value << f.selection.min_detection_rate;
    e << YAML::EndMap;

    e << YAML::Key << "metrics" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "association_radius_m" << YAML::Value << c.metrics.association_radius_m;
    e << YAML::Key << "percentile_level" << YAML::Value << c.metrics.percentile_level;
    e << YAML::Key << "exclude_rank_deficient" << YAML::Value << c.metrics.exclude_rank_deficient;
    e << YAML::EndMap;

    e << YAML::Key << "overhead" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "symbols_per_trp" << YAML::Value << c.overhead.symbols_per_trp;
    e << YAML::EndMap;

    const auto& k = c.campaign;
    e << YAML::Key << "campaign" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "n_drops" << YAML::Value << k.n_drops;
    e << YAML::Key << "workers" << YAML::Value << k.workers;
    e << YAML::Key << "vth" << YAML::Value << YAML::Flow << k.vth;
    e << YAML::Key << "k_strongest" << YAML::Value << YAML::Flow << k.k_strongest;
    e << YAML::Key << "tx_power_dbm" << YAML::Value << YAML::Flow << k.tx_power_dbm;
    e << YAML::Key << "d_v" << YAML::Value << YAML::Flow << k.d_v;
    e << YAML::Key << "t_refresh_s" << YAML::Value << YAML::Flow << k.t_refresh_s;
    e << YAML::Key << "per_trp" << YAML::Value << k.per_trp;
    e << YAML::EndMap;

    e << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "directory" << YAML::Value << c.output.directory;
    e << YAML::Key << "dump_paths" << YAML::Value << c.output.dump_paths;
    e << YAML::Key << "dump_maps" << YAML::Value << c.output.dump_maps;
    e << YAML::EndMap;

    e << YAML::EndMap;
    return std::string(e.c_str()) + "\n";
}

}  // namespace mtrp
