// Command-line front end: closed-form parametrization, baseline comparison,
// simulation, worst-case sweeps, bounds, BLE configuration, and the
// exhaustive grid search. See README.md for usage.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ndopt/ble.hpp"
#include "ndopt/bounds.hpp"
#include "ndopt/io.hpp"
#include "ndopt/multiint.hpp"
#include "ndopt/optsearch.hpp"
#include "ndopt/sim/monte_carlo.hpp"
#include "ndopt/sim/sweep.hpp"
#include "ndopt/singleint.hpp"
#include "ndopt/slotted.hpp"
#include "ndopt/svg.hpp"
#include "ndopt/time.hpp"
#include "ndopt/version.hpp"

using nlohmann::json;
using namespace ndopt;

namespace {

// ---------------------------------------------------------------- parsing

double parse_time(const std::string& s) {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    const std::string unit = s.substr(pos);
    if (unit == "ns") return v * 1e-9;
    if (unit == "us") return v * 1e-6;
    if (unit == "ms") return v * 1e-3;
    if (unit == "s") return v;
    throw CLI::ValidationError("time values need a unit suffix (ns/us/ms/s): " + s);
}

double parse_duty(const std::string& s) {
    if (!s.empty() && s.back() == '%') return std::stod(s.substr(0, s.size() - 1)) / 100.0;
    const double v = std::stod(s);
    if (v >= 1.0)
        throw CLI::ValidationError("duty-cycle must be a fraction below 1 or use a % suffix: " + s);
    return v;
}

// "lo:hi:n" with duty-cycle endpoints.
std::vector<double> parse_eta_range(const std::string& s) {
    std::stringstream ss(s);
    std::string lo, hi, n;
    if (!std::getline(ss, lo, ':')) throw CLI::ValidationError("bad range: " + s);
    if (!std::getline(ss, hi, ':')) return {parse_duty(lo)};
    if (!std::getline(ss, n, ':')) throw CLI::ValidationError("range needs lo:hi:count: " + s);
    const int count = std::stoi(n);
    if (count < 1) throw CLI::ValidationError("range count must be positive");
    return linspace(parse_duty(lo), parse_duty(hi), count);
}

// "lo:hi:step" with time suffixes on each part.
struct TimeRange {
    double lo, hi, step;
};
TimeRange parse_time_range(const std::string& s) {
    std::stringstream ss(s);
    std::string a, b, c;
    if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c, ':'))
        throw CLI::ValidationError("time range needs lo:hi:step: " + s);
    return {parse_time(a), parse_time(b), parse_time(c)};
}

std::string iso_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%FT%TZ", std::gmtime(&t));
    return buf;
}

void emit(const std::string& path, const std::string& content) {
    if (path.empty())
        std::cout << content;
    else
        io::atomic_write(path, content);
}

// ------------------------------------------------------------- scheme glue

struct Resolved {
    PiParams params;
    double dm = 0.0;     ///< analytic worst case (compensation-adjusted when -bc)
    double p_blk = 0.0;
    double eta_achieved = 0.0; ///< includes the compensation surcharge when -bc
    int m = 0;
    int k = 0;
    bool clamped = false;
    std::string scheme;
};

Resolved resolve_scheme(const std::string& scheme, double eta, const HardwareProfile& hw,
                        bool force, BcDutyModel bc_model) {
    Resolved r;
    r.scheme = scheme;
    if (scheme == "singleint" || scheme == "singleint-bound") {
        const auto mode = scheme == "singleint" ? SingleIntMode::RoundedOpt
                                                : SingleIntMode::BoundOptimal;
        const SingleIntSolution s = singleint_solve({eta}, hw, mode, force);
        r.params = s.params;
        r.dm = s.dm;
        r.m = s.m;
        r.clamped = s.clamped;
        r.eta_achieved = duty_cycle(s.params, hw).eta;
    } else if (scheme == "multiint1" || scheme == "multiint2" || scheme == "multiint3") {
        const int m = scheme[8] - '0';
        const MultiIntSolution s = multiint_solve({eta}, m, hw, force);
        r.params = s.params;
        r.dm = s.dm;
        r.m = s.m;
        r.k = s.k_c;
        r.clamped = s.clamped;
        r.eta_achieved = s.eta_solved;
    } else if (scheme == "multiint2-bc") {
        const MultiIntSolution s = bc_adjust({eta}, hw, bc_model);
        r.params = s.params;
        r.dm = s.dm;
        r.p_blk = s.p_blk;
        r.m = s.m;
        r.k = s.k_c;
        r.clamped = s.clamped;
        r.eta_achieved = s.eta_solved + bc_duty_surcharge(hw, bc_model) / s.params.ts;
    } else {
        throw CLI::ValidationError("unknown scheme: " + scheme);
    }
    return r;
}

sim::ClockModel make_clock(const std::string& kind, double f_clk, bool no_correction,
                           int ext_ticks) {
    if (kind == "ideal") return sim::ClockModel::ideal();
    if (kind == "quantized") return sim::ClockModel::quantized(f_clk, !no_correction, ext_ticks);
    throw CLI::ValidationError("unknown clock model: " + kind);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Periodic-interval neighbor-discovery toolkit"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    // Hardware flags live on the parent; let them appear after the
    // subcommand name as well.
    app.fallthrough();

    std::string profile_path;
    app.add_option("--profile", profile_path, "hardware profile JSON");

    // Per-field hardware overrides shared by all subcommands.
    std::string ov_da, ov_ds_min, ov_drt, ov_dtr;
    double ov_fclk = 0.0, ov_alpha = 0.0;
    app.add_option("--da", ov_da, "beacon duration (e.g. 32us)");
    app.add_option("--ds-min", ov_ds_min, "minimum scan window");
    app.add_option("--drt", ov_drt, "rx->tx turnaround");
    app.add_option("--dtr", ov_dtr, "tx->rx turnaround");
    app.add_option("--fclk", ov_fclk, "sleep clock frequency [Hz]");
    app.add_option("--alpha", ov_alpha, "tx/rx energy balance");

    const auto hardware = [&]() {
        HardwareProfile hw =
            profile_path.empty() ? HardwareProfile{} : io::load_profile(profile_path);
        if (!ov_da.empty()) hw.da = parse_time(ov_da);
        if (!ov_ds_min.empty()) hw.ds_min = parse_time(ov_ds_min);
        if (!ov_drt.empty()) hw.drt = parse_time(ov_drt);
        if (!ov_dtr.empty()) hw.dtr = parse_time(ov_dtr);
        if (ov_fclk > 0) hw.f_clk = ov_fclk;
        if (ov_alpha > 0) hw.alpha = ov_alpha;
        hw.validate();
        return hw;
    };

    const auto manifest = [&](const std::string& cmd, const HardwareProfile& hw,
                              uint64_t seed) {
        io::RunManifest m;
        m.command = cmd;
        std::ostringstream args;
        for (int i = 2; i < argc; ++i) args << argv[i] << (i + 1 < argc ? " " : "");
        m.args = args.str();
        m.profile = io::profile_hash(hw);
        m.master_seed = seed;
        m.started = iso_now();
        return m;
    };

    // ---------------------------------------------------------------- param
    auto* cmd_param = app.add_subcommand("param", "duty-cycle to protocol parameters");
    std::string p_scheme = "singleint", p_eta, p_out, p_bc_cost = "beacons";
    bool p_force = false, p_margin = false;
    cmd_param->add_option("--scheme", p_scheme,
                          "singleint|singleint-bound|multiint1|multiint2|multiint3|multiint2-bc");
    cmd_param->add_option("--eta", p_eta, "target duty-cycle (fraction or %)")->required();
    cmd_param->add_option("--out", p_out, "output JSON path (default stdout)");
    cmd_param->add_option("--bc-cost", p_bc_cost, "beacons|turnaround (multiint2-bc)");
    cmd_param->add_flag("--force", p_force, "skip the conservative duty-cycle limit");
    cmd_param->add_flag("--ts-safety-margin", p_margin,
                        "emit Ts reduced by one sleep-clock tick");

    // -------------------------------------------------------------- compare
    auto* cmd_compare = app.add_subcommand("compare", "gains over slotted baselines");
    std::string c_eta = "0.002:0.0155:28", c_pblk = "0.19%", c_out, c_svg;
    std::string c_searchlight = "verbatim", c_bc_cost = "turnaround";
    int c_nihao_gamma = 2, c_nihao_m = 33;
    cmd_compare->add_option("--eta", c_eta, "duty-cycle grid lo:hi:count");
    cmd_compare->add_option("--pblk", c_pblk, "target failure probability");
    cmd_compare->add_option("--searchlight", c_searchlight, "verbatim|gain");
    cmd_compare->add_option("--bc-cost", c_bc_cost, "beacons|turnaround");
    cmd_compare->add_option("--nihao-gamma", c_nihao_gamma, "beacons per period");
    cmd_compare->add_option("--nihao-m", c_nihao_m, "listen-only block length");
    cmd_compare->add_option("--out", c_out, "CSV output path");
    cmd_compare->add_option("--svg", c_svg, "SVG plot path");

    // ------------------------------------------------------------- simulate
    auto* cmd_sim = app.add_subcommand("simulate", "seeded Monte Carlo trials");
    std::string s_scheme = "multiint2-bc", s_eta, s_mode = "twoway", s_clock = "ideal";
    std::string s_out, s_svg, s_timeout = "35s", s_bc_cost = "beacons", s_ble_delay;
    long s_trials = 10000;
    uint64_t s_seed = 1;
    int s_ndev = 2, s_ext = 5;
    bool s_no_corr = false, s_force = false;
    cmd_sim->add_option("--scheme", s_scheme, "scheme name as in param");
    cmd_sim->add_option("--eta", s_eta, "duty-cycle")->required();
    cmd_sim->add_option("--trials", s_trials, "number of trials");
    cmd_sim->add_option("--mode", s_mode, "oneway|twoway");
    cmd_sim->add_option("--clock", s_clock, "ideal|quantized");
    cmd_sim->add_option("--ds-ext-ticks", s_ext, "window extension (quantized clock)");
    cmd_sim->add_flag("--no-q-correction", s_no_corr, "disable drift correction");
    cmd_sim->add_option("--seed", s_seed, "master seed");
    cmd_sim->add_option("--n-devices", s_ndev, "devices in range (collision interferers)");
    cmd_sim->add_option("--timeout", s_timeout, "per-trial horizon cap");
    cmd_sim->add_option("--ble-delay", s_ble_delay, "per-interval random delay cap");
    cmd_sim->add_option("--bc-cost", s_bc_cost, "beacons|turnaround");
    cmd_sim->add_option("--out", s_out, "output prefix (.csv/.json)");
    cmd_sim->add_option("--svg", s_svg, "CDF plot path");
    cmd_sim->add_flag("--force", s_force, "skip the conservative duty-cycle limit");

    // ---------------------------------------------------------------- sweep
    auto* cmd_sweep = app.add_subcommand("sweep", "exact worst case over all offsets");
    std::string w_scheme = "singleint", w_eta, w_clock = "ideal";
    int w_ext = 5;
    bool w_no_corr = false, w_assert = false, w_force = false;
    cmd_sweep->add_option("--scheme", w_scheme, "scheme name as in param");
    cmd_sweep->add_option("--eta", w_eta, "duty-cycle")->required();
    cmd_sweep->add_option("--clock", w_clock, "ideal|quantized");
    cmd_sweep->add_option("--ds-ext-ticks", w_ext, "window extension (quantized clock)");
    cmd_sweep->add_flag("--no-q-correction", w_no_corr, "disable drift correction");
    cmd_sweep->add_flag("--assert-bound", w_assert,
                        "exit 4 unless the sweep meets the bound (1% slack on quantized clocks)");
    cmd_sweep->add_flag("--force", w_force, "skip the conservative duty-cycle limit");

    // --------------------------------------------------------------- search
    auto* cmd_search = app.add_subcommand("search", "exhaustive grid over (Ta, Ts, ds)");
    std::string g_ta = "50ms:1s:50ms", g_ts = "50ms:1s:50ms", g_ds_step = "50ms";
    std::string g_da = "240us", g_out;
    double g_eta_lo = 0.001, g_eta_hi = 0.10;
    long g_budget = 1'000'000;
    unsigned g_threads = 2;
    bool g_paper = false;
    cmd_search->add_option("--ta", g_ta, "advertising interval range lo:hi:step");
    cmd_search->add_option("--ts", g_ts, "scan interval range lo:hi:step");
    cmd_search->add_option("--ds-step", g_ds_step, "scan window step");
    cmd_search->add_option("--da", g_da, "beacon duration");
    cmd_search->add_option("--eta-lo", g_eta_lo, "duty-cycle band lower edge");
    cmd_search->add_option("--eta-hi", g_eta_hi, "duty-cycle band upper edge");
    cmd_search->add_option("--budget", g_budget, "max grid cells");
    cmd_search->add_option("--threads", g_threads, "worker threads");
    cmd_search->add_flag("--paper-grid", g_paper,
                         "10ms..5s in 10ms steps (very long run)");
    cmd_search->add_option("--out", g_out, "CSV output for low-gap rows");

    // ---------------------------------------------------------------- bound
    auto* cmd_bound = app.add_subcommand("bound", "latency bound and optimality check");
    std::string b_eta;
    bool b_assert = false;
    cmd_bound->add_option("--eta", b_eta, "joint duty-cycle")->required();
    cmd_bound->add_flag("--assert-equal", b_assert, "exit 4 unless the scheme attains it");

    // ------------------------------------------------------------------ ble
    auto* cmd_ble = app.add_subcommand("ble", "standard-compliant configuration");
    std::string l_eta, l_mode = "unidir", l_out;
    int l_payload = 30;
    bool l_no_round = false, l_force = false, l_mi_hook = false;
    cmd_ble->add_option("--eta-joint", l_eta, "joint duty-cycle of the pair")->required();
    cmd_ble->add_option("--mode", l_mode, "unidir|bidir");
    cmd_ble->add_option("--payload", l_payload, "advertising payload bytes");
    cmd_ble->add_flag("--no-rounding", l_no_round, "skip the 0.625 ms grid");
    cmd_ble->add_flag("--force", l_force, "allow duty-cycles outside [2.15%, 10%]");
    cmd_ble->add_flag("--multiint-hook", l_mi_hook,
                      "report what a multi-interval parametrization would need "
                      "(informational; not standard-compliant)");
    cmd_ble->add_option("--out", l_out, "output JSON path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const HardwareProfile hw = hardware();
        const auto bc_model_of = [](const std::string& s) {
            if (s == "beacons") return BcDutyModel::TwoBeacons;
            if (s == "turnaround") return BcDutyModel::TwoBeaconsPlusTurnaround;
            throw CLI::ValidationError("unknown bc cost model: " + s);
        };

        if (*cmd_param) {
            const Resolved r =
                resolve_scheme(p_scheme, parse_duty(p_eta), hw, p_force, bc_model_of(p_bc_cost));
            const sim::SchedParamsNs q = sim::quantize_params(r.params, p_margin, hw.f_clk);
            io::RunManifest m = manifest("param", hw, 0);
            m.finished = iso_now();
            json j{{"Ta", r.params.ta},
                   {"Ts", p_margin ? ns_to_seconds({q.ts}) : r.params.ts},
                   {"ds", r.params.ds},
                   {"M", r.m},
                   {"k", r.k},
                   {"dm", r.dm},
                   {"p_blk", r.p_blk},
                   {"eta_achieved", r.eta_achieved},
                   {"scheme", r.scheme},
                   {"clamped", r.clamped},
                   {"manifest", m.to_json()}};
            emit(p_out, j.dump(2) + "\n");
            return 0;
        }

        if (*cmd_compare) {
            const std::vector<double> grid = parse_eta_range(c_eta);
            const auto se = c_searchlight == "gain" ? SearchlightEval::GainConsistent
                                                    : SearchlightEval::PublishedRow;
            const GainTable t = gain_table(grid, hw, parse_duty(c_pblk), se,
                                           bc_model_of(c_bc_cost), c_nihao_gamma, c_nihao_m);
            io::RunManifest m = manifest("compare", hw, 0);

            std::ostringstream csv;
            csv << "# " << m.comment_line() << "\n";
            csv << "eta,protocol,d_sl,dm_protocol,dm_reference,gain\n";
            for (const auto& row : t.rows)
                csv << row.eta << "," << protocol_name(row.protocol) << "," << row.d_sl << ","
                    << row.dm_protocol << "," << row.dm_reference << "," << row.gain << "\n";
            if (!c_out.empty()) io::atomic_write(c_out, csv.str());

            std::cout << "searchlight evaluator: "
                      << (se == SearchlightEval::GainConsistent ? "gain-consistent"
                                                                : "published-row")
                      << "\nbc duty model: " << c_bc_cost << "\n";
            std::cout << "protocol      G_max      G_mean\n";
            for (const auto& s : t.summary) {
                std::printf("%-12s %9.1f  %9.1f\n", protocol_name(s.protocol), s.g_max,
                            s.g_mean);
            }
            if (!c_svg.empty()) {
                svg::PlotSpec spec;
                spec.title = "worst-case latency vs duty-cycle";
                spec.xlabel = "duty-cycle";
                spec.ylabel = "dm [s]";
                spec.logy = true;
                spec.comment = m.comment_line();
                std::vector<svg::Series> series;
                for (const auto& s : t.summary) {
                    svg::Series line{protocol_name(s.protocol), {}, false};
                    for (const auto& row : t.rows)
                        if (row.protocol == s.protocol)
                            line.points.emplace_back(row.eta, row.dm_protocol);
                    series.push_back(std::move(line));
                }
                svg::Series ref{"reference", {}, false};
                for (size_t i = 0; i < grid.size(); ++i)
                    ref.points.emplace_back(t.rows[i].eta, t.rows[i].dm_reference);
                series.push_back(std::move(ref));
                io::atomic_write(c_svg, svg::render(spec, series));
            }
            return 0;
        }

        if (*cmd_sim) {
            const double eta = parse_duty(s_eta);
            const Resolved r =
                resolve_scheme(s_scheme, eta, hw, s_force, bc_model_of(s_bc_cost));
            sim::ScenarioConfig cfg;
            cfg.params = sim::quantize_params(r.params, false, hw.f_clk);
            cfg.hw = hw;
            cfg.mode = s_mode == "oneway" ? sim::SimMode::OneWay : sim::SimMode::TwoWay;
            cfg.n_devices = s_ndev;
            cfg.trials = s_trials;
            cfg.master_seed = s_seed;
            cfg.timeout_ns = seconds_to_ns(parse_time(s_timeout)).ns;
            cfg.clock = make_clock(s_clock, hw.f_clk, s_no_corr, s_ext);
            cfg.dm_predicted_ns = seconds_to_ns(r.dm).ns;
            if (!s_ble_delay.empty())
                cfg.ble_random_delay_ns = seconds_to_ns(parse_time(s_ble_delay)).ns;

            io::RunManifest m = manifest("simulate", hw, s_seed);
            const sim::MonteCarloResult res = sim::monte_carlo(cfg);
            m.finished = iso_now();

            if (!s_out.empty()) {
                std::ostringstream csv;
                csv << "# " << m.comment_line() << "\n";
                csv << "trial,seed,latency_ab_ns,latency_ba_ns,failed\n";
                for (const auto& o : res.outcomes)
                    csv << o.trial << "," << o.seed << ","
                        << (o.latency_ab ? *o.latency_ab : -1) << ","
                        << (o.latency_ba ? *o.latency_ba : -1) << ","
                        << ((o.failed_ab || o.failed_ba) ? 1 : 0) << "\n";
                io::atomic_write(s_out + ".csv", csv.str());
            }

            json agg{{"failure_rate", res.failure_rate},
                     {"failures", res.failures},
                     {"discoveries", res.discovery_count},
                     {"mean", res.mean_latency_s},
                     {"mean_twoway", res.mean_twoway_s},
                     {"p50", res.p50},
                     {"p95", res.p95},
                     {"p99", res.p99},
                     {"dm_predicted", ns_to_seconds({res.dm_predicted_ns})},
                     {"manifest", m.to_json()}};
            json cdf = json::array();
            const size_t n = res.cdf_latencies_s.size();
            const size_t step = std::max<size_t>(1, n / 256);
            for (size_t i = 0; i < n; i += step)
                cdf.push_back({{"latency", res.cdf_latencies_s[i]},
                               {"fraction", static_cast<double>(i + 1) / n}});
            agg["cdf"] = cdf;
            if (!s_out.empty())
                io::atomic_write(s_out + ".json", agg.dump(2) + "\n");
            else
                std::cout << agg.dump(2) << "\n";

            if (!s_svg.empty()) {
                svg::PlotSpec spec;
                spec.title = "discovery latency CDF";
                spec.xlabel = "latency [s]";
                spec.ylabel = "fraction";
                spec.comment = m.comment_line();
                svg::Series line{"simulated", {}, false};
                for (size_t i = 0; i < n; i += step)
                    line.points.emplace_back(res.cdf_latencies_s[i],
                                             static_cast<double>(i + 1) / n);
                io::atomic_write(s_svg, svg::render(spec, {line}));
            }
            return 0;
        }

        if (*cmd_sweep) {
            const double eta = parse_duty(w_eta);
            const Resolved r = resolve_scheme(w_scheme, eta, hw, w_force, BcDutyModel::TwoBeacons);
            const sim::SchedParamsNs q = sim::quantize_params(r.params, false, hw.f_clk);
            const int64_t dm = sim::predicted_dm_ns(q);
            const auto clock = make_clock(w_clock, hw.f_clk, w_no_corr, w_ext);
            const sim::SweepResult res = sim::offset_sweep_oracle(q, q, clock, 4 * dm);
            json j{{"bounded", res.bounded},
                   {"worst_latency", ns_to_seconds({res.worst_latency})},
                   {"worst_offset", ns_to_seconds({res.worst_offset})},
                   {"dm_analytic", ns_to_seconds({dm})},
                   {"probes", res.probes}};
            if (res.has_mean) j["mean_dstar"] = res.mean_dstar_s;
            std::cout << j.dump(2) << "\n";
            if (w_assert) {
                // Ideal clocks must meet the analytic bound exactly; the
                // quantized clock may drift within the 1% measurement rule.
                const bool ok =
                    res.bounded &&
                    (clock.kind == sim::ClockModel::Kind::Ideal
                         ? res.worst_latency <= dm && 100 * res.worst_latency >= 99 * dm
                         : res.worst_latency <= dm + dm / 100);
                if (!ok) return 4;
            }
            return 0;
        }

        if (*cmd_search) {
            SearchGrid grid;
            if (g_paper) {
                grid.ta_min = grid.ts_min = 10e-3;
                grid.ta_max = grid.ts_max = 5.0;
                grid.ta_step = grid.ts_step = 10e-3;
                grid.ds_step = 10e-3;
                grid.budget = 40'000'000'000L;
            } else {
                const TimeRange ta = parse_time_range(g_ta);
                const TimeRange ts = parse_time_range(g_ts);
                grid.ta_min = ta.lo;
                grid.ta_max = ta.hi;
                grid.ta_step = ta.step;
                grid.ts_min = ts.lo;
                grid.ts_max = ts.hi;
                grid.ts_step = ts.step;
                grid.ds_step = parse_time(g_ds_step);
                grid.budget = g_budget;
            }
            grid.da = parse_time(g_da);
            grid.eta_lo = g_eta_lo;
            grid.eta_hi = g_eta_hi;

            io::RunManifest m = manifest("search", hw, 0);
            const GridSearchResult res = grid_search(grid, hw, 0.5, g_threads);
            m.finished = iso_now();

            json j{{"cells", res.cells},
                   {"evaluated", res.evaluated},
                   {"unbounded", res.unbounded},
                   {"violations", res.violations.size()},
                   {"min_gap", res.min_gap},
                   {"exact_matches", res.exact_matches},
                   {"min_positive_gap", res.min_positive_gap},
                   {"witness",
                    {{"Ta", res.min_gap_row.ta},
                     {"Ts", res.min_gap_row.ts},
                     {"ds", res.min_gap_row.ds},
                     {"eta", res.min_gap_row.eta},
                     {"candidate_dm", res.min_gap_row.candidate_dm},
                     {"singleint_dm", res.min_gap_row.singleint_dm}}},
                   {"manifest", m.to_json()}};
            std::cout << j.dump(2) << "\n";

            if (!g_out.empty()) {
                std::ostringstream csv;
                csv << "# " << m.comment_line() << "\n";
                csv << "Ta,Ts,ds,eta,candidate_dm,singleint_dm,gap\n";
                for (const auto& row : res.reported)
                    csv << row.ta << "," << row.ts << "," << row.ds << "," << row.eta << ","
                        << row.candidate_dm << "," << row.singleint_dm << "," << row.gap
                        << "\n";
                io::atomic_write(g_out, csv.str());
            }
            return res.violations.empty() ? 0 : 4;
        }

        if (*cmd_bound) {
            const double eta = parse_duty(b_eta);
            const OptimalityReport r = check_singleint_optimal(eta, hw.da);
            json j{{"bound", r.bound},
                   {"singleint_relaxed_dm", r.singleint_relaxed_dm},
                   {"optimal", r.equal}};
            std::cout << j.dump(2) << "\n";
            return (b_assert && !r.equal) ? 4 : 0;
        }

        if (*cmd_ble) {
            BleOverheads oh;
            oh.payload_bytes = l_payload;
            if (l_mi_hook) {
                HardwareProfile mi_hw = hw;
                mi_hw.da = oh.beacon_air_time();
                const MultiIntSolution s =
                    multiint_solve({parse_duty(l_eta)}, 2, mi_hw, l_force);
                const MultiIntBleReport r = multiint_ble_hook(s.params, oh);
                json j{{"advInterval_ms", s.params.ta * 1e3},
                       {"scanInterval_ms", s.params.ts * 1e3},
                       {"scanWindow_ms", r.extended_ds * 1e3},
                       {"max_random_delay_ms", r.max_random_delay * 1e3},
                       {"intervals_per_step", r.intervals_per_step},
                       {"standard_compliant", false},
                       {"warning",
                        "requires shrinking the advertising random delay below the "
                        "standard value; stock stacks cannot run this"}};
                emit(l_out, j.dump(2) + "\n");
                return 0;
            }
            const BleMode mode =
                l_mode == "bidir" ? BleMode::ConnectableBidir : BleMode::NonConnectableUnidir;
            BleSolution s = ble_solve(parse_duty(l_eta), oh, mode, hw, l_force);
            const BleSolution emitted = l_no_round ? s : ble_round_to_grid(s);
            const BleCompliance lint = ble_compliance(emitted);
            io::RunManifest m = manifest("ble", hw, 0);
            m.finished = iso_now();
            json j{{"advInterval_ms", emitted.params.ta * 1e3},
                   {"scanInterval_ms", emitted.params.ts * 1e3},
                   {"scanWindow_ms", emitted.ds_configured * 1e3},
                   {"mode", l_mode},
                   {"predicted_dm_ms", s.dm * 1e3},
                   {"eta_joint", s.eta_joint},
                   {"M", s.m},
                   {"compliant", lint.ok},
                   {"violations", lint.violations},
                   {"manifest", m.to_json()}};
            emit(l_out, j.dump(2) + "\n");
            return lint.ok ? 0 : 4;
        }
    } catch (const infeasible_error& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 3;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
