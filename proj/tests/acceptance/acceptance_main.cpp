// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Thresholds are fixed here, not tuned at runtime.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "ndopt/ble.hpp"
#include "ndopt/bounds.hpp"
#include "ndopt/multiint.hpp"
#include "ndopt/optsearch.hpp"
#include "ndopt/sim/monte_carlo.hpp"
#include "ndopt/sim/sweep.hpp"
#include "ndopt/singleint.hpp"
#include "ndopt/slotted.hpp"

using namespace ndopt;
using namespace ndopt::sim;

namespace {

int g_failures = 0;

struct Criterion {
    std::string name;
    bool pass = true;
    std::vector<std::string> notes;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    explicit Criterion(std::string n) : name(std::move(n)) {}

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            notes.push_back(what);
        }
    }
    void note(const std::string& what) { notes.push_back(what); }

    ~Criterion() {
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s %s (%.1fs)\n", pass ? "PASS" : "FAIL", name.c_str(), secs);
        for (const auto& n : notes) std::printf("       - %s\n", n.c_str());
        std::fflush(stdout);
        if (!pass) ++g_failures;
    }
};

bool within(double value, double target, double rel) {
    return std::abs(value - target) <= rel * std::abs(target);
}

std::string fmt(const char* f, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

const HardwareProfile kHw; // 32 us beacon, 1 ms window floor, 140 us turnarounds

void criterion_1_parameter_table() {
    Criterion c("criterion 1: closed-form parameter table (30 values, +-0.0001 s)");
    struct Row {
        double eta, si_ta, si_ts, si_ds, mi_ta, mi_ts, mi_ds;
    };
    const Row rows[] = {
        {0.0020, 0.0320, 32.0320, 0.0321, 0.0321, 10.6986, 0.0107},
        {0.0055, 0.0117, 4.2430, 0.0117, 0.0117, 1.4221, 0.0039},
        {0.0090, 0.0071, 1.5874, 0.0072, 0.0071, 0.5338, 0.0024},
        {0.0120, 0.0054, 0.8942, 0.0054, 0.0054, 0.3016, 0.0018},
        {0.0155, 0.0041, 0.5369, 0.0042, 0.0042, 0.1817, 0.0014},
    };
    for (const Row& r : rows) {
        const SingleIntSolution si = singleint_solve({r.eta}, kHw);
        const MultiIntSolution mi = multiint_solve({r.eta}, 2, kHw);
        const double tol = 1e-4;
        c.require(std::abs(si.params.ta - r.si_ta) <= tol, fmt("SingleInt Ta %.6f vs %.4f", si.params.ta, r.si_ta));
        c.require(std::abs(si.params.ts - r.si_ts) <= tol, fmt("SingleInt Ts %.6f vs %.4f", si.params.ts, r.si_ts));
        c.require(std::abs(si.params.ds - r.si_ds) <= tol, fmt("SingleInt ds %.6f vs %.4f", si.params.ds, r.si_ds));
        c.require(std::abs(mi.params.ta - r.mi_ta) <= tol, fmt("MultiInt Ta %.6f vs %.4f", mi.params.ta, r.mi_ta));
        c.require(std::abs(mi.params.ts - r.mi_ts) <= tol, fmt("MultiInt Ts %.6f vs %.4f", mi.params.ts, r.mi_ts));
        c.require(std::abs(mi.params.ds - r.mi_ds) <= tol, fmt("MultiInt ds %.6f vs %.4f", mi.params.ds, r.mi_ds));
    }
}

void criterion_2_optimality() {
    Criterion c("criterion 2: scheme attains the symmetric bound (1000 points, 1e-9)");
    int bad = 0;
    for (int i = 0; i < 1000; ++i) {
        const double eta = 0.002 * std::pow(0.5 / 0.002, i / 999.0);
        if (!check_singleint_optimal(eta, kHw.da).equal) ++bad;
    }
    c.require(bad == 0, "mismatching duty-cycles: " + std::to_string(bad));
}

void criterion_3_oracle_vs_formula() {
    Criterion c("criterion 3: offset-sweep oracle within [0.99 dm, dm] for all table rows");
    for (double eta : {0.0020, 0.0055, 0.0090, 0.0120, 0.0155}) {
        {
            const auto s = singleint_solve({eta}, kHw);
            const SchedParamsNs q = quantize_params(s.params);
            const int64_t dm = predicted_dm_ns(q);
            const SweepResult r = offset_sweep_oracle(q, q, ClockModel::ideal(), 4 * dm);
            c.require(r.bounded, fmt("SingleInt eta=%.4f unbounded %f", eta, 0.0));
            c.require(r.worst_latency <= dm,
                      fmt("SingleInt sweep %.6f above dm %.6f", 1e-9 * r.worst_latency, 1e-9 * dm));
            c.require(100 * r.worst_latency >= 99 * dm,
                      fmt("SingleInt sweep %.6f below 0.99 dm %.6f", 1e-9 * r.worst_latency, 1e-9 * dm));
        }
        {
            const auto s = multiint_solve({eta}, 2, kHw);
            const SchedParamsNs q = quantize_params(s.params);
            const int64_t dm = predicted_dm_ns(q);
            const SweepResult r = offset_sweep_oracle(q, q, ClockModel::ideal(), 4 * dm);
            c.require(r.bounded, fmt("MultiInt eta=%.4f unbounded %f", eta, 0.0));
            c.require(r.worst_latency <= dm,
                      fmt("MultiInt sweep %.6f above dm %.6f", 1e-9 * r.worst_latency, 1e-9 * dm));
            c.require(100 * r.worst_latency >= 99 * dm,
                      fmt("MultiInt sweep %.6f below 0.99 dm %.6f", 1e-9 * r.worst_latency, 1e-9 * dm));
        }
    }
}

void criterion_4_blocking_probabilities() {
    Criterion c("criterion 4: blocking probabilities at the published points");
    const double p_lo = bc_failure_prob(multiint_solve({0.002}, 2, kHw).params, kHw);
    const double p_hi = bc_failure_prob(multiint_solve({0.0155}, 2, kHw).params, kHw);
    c.require(std::abs(p_lo - 0.00003) <= 0.0001, fmt("compensated at 0.2%%: %.6f vs %.6f", p_lo, 0.00003));
    c.require(std::abs(p_hi - 0.00193) <= 0.0001, fmt("compensated at 1.55%%: %.6f vs %.6f", p_hi, 0.00193));
    const double p_si = singleint_blocking(singleint_solve({0.0155}, kHw).params, kHw);
    c.require(std::abs(p_si - 0.075) <= 0.001, fmt("uncompensated: %.4f vs %.4f", p_si, 0.075));
}

void criterion_5_monte_carlo_failure_rate() {
    Criterion c("criterion 5: simulated failure rates at matched trial counts");
    {
        const MultiIntSolution bc = bc_adjust({0.0155}, kHw);
        ScenarioConfig cfg;
        cfg.params = quantize_params(bc.params);
        cfg.hw = kHw;
        cfg.mode = SimMode::TwoWay;
        cfg.trials = 100000;
        cfg.master_seed = 7;
        cfg.dm_predicted_ns = seconds_to_ns(bc.dm).ns;
        const MonteCarloResult r = monte_carlo(cfg);
        const double sigma =
            std::sqrt(r.failure_rate * (1 - r.failure_rate) / r.discovery_count);
        c.note(fmt("two-way at 1.55%%: rate %.5f (3-sigma %.5f)", r.failure_rate, 3 * sigma));
        c.require(std::abs(r.failure_rate - 0.00193) <= 3 * sigma + 1e-12,
                  fmt("rate %.5f not within 3 sigma of %.5f", r.failure_rate, 0.00193));
        c.require(r.failure_rate >= 0.001 && r.failure_rate <= 0.0035,
                  fmt("rate %.5f outside [0.001, %.4f]", r.failure_rate, 0.0035));
    }
    {
        const MultiIntSolution bc = bc_adjust({0.002}, kHw);
        ScenarioConfig cfg;
        cfg.params = quantize_params(bc.params);
        cfg.hw = kHw;
        cfg.mode = SimMode::TwoWay;
        cfg.trials = 10000; // 20000 one-way discoveries
        cfg.master_seed = 7;
        cfg.dm_predicted_ns = seconds_to_ns(bc.dm).ns;
        const MonteCarloResult r = monte_carlo(cfg);
        c.require(r.failures == 0,
                  fmt("0.2%% run has %.0f failures across %.0f discoveries",
                      double(r.failures), double(r.discovery_count)));
    }
}

void criterion_6_gains() {
    Criterion c("criterion 6: gain table against slotted baselines");
    const auto grid = linspace(0.002, 0.0155, 28);
    const auto find = [](const GainTable& t, SlottedProtocol p) {
        for (const auto& s : t.summary)
            if (s.protocol == p) return s;
        return GainSummary{};
    };

    const GainTable t = gain_table(grid, kHw, 0.0019, SearchlightEval::GainConsistent,
                                   BcDutyModel::TwoBeaconsPlusTurnaround);
    const auto disco = find(t, SlottedProtocol::Disco);
    const auto dc = find(t, SlottedProtocol::OptimalDiffcodes);
    const auto sl = find(t, SlottedProtocol::SearchlightStriped);
    const auto uc = find(t, SlottedProtocol::UConnect);
    const auto nh = find(t, SlottedProtocol::GNihao);
    c.note(fmt("disco %.1f / %.1f", disco.g_max, disco.g_mean));
    c.require(within(disco.g_max, 6119.1, 0.02), fmt("disco G_max %.1f vs %.1f", disco.g_max, 6119.1));
    c.require(within(disco.g_mean, 5663.9, 0.02), fmt("disco G_mean %.1f vs %.1f", disco.g_mean, 5663.9));
    c.note(fmt("diffcodes %.1f / %.1f", dc.g_max, dc.g_mean));
    c.require(within(dc.g_max, 415.5, 0.02), fmt("diffcodes G_max %.1f vs %.1f", dc.g_max, 415.5));
    c.require(within(dc.g_mean, 384.6, 0.02), fmt("diffcodes G_mean %.1f vs %.1f", dc.g_mean, 384.6));
    c.note(fmt("searchlight %.1f / %.1f", sl.g_max, sl.g_mean));
    c.require(within(sl.g_max, 830.0, 0.02), fmt("searchlight G_max %.1f vs %.1f", sl.g_max, 830.0));
    c.require(within(sl.g_mean, 768.1, 0.02), fmt("searchlight G_mean %.1f vs %.1f", sl.g_mean, 768.1));
    c.note(fmt("u-connect %.2f / %.2f", uc.g_max, uc.g_mean));
    c.require(within(uc.g_max, 4.4, 0.05), fmt("u-connect G_max %.2f vs %.2f", uc.g_max, 4.4));
    c.require(within(uc.g_mean, 4.1, 0.05), fmt("u-connect G_mean %.2f vs %.2f", uc.g_mean, 4.1));
    c.note(fmt("g-nihao %.2f / %.2f", nh.g_max, nh.g_mean));
    c.require(nh.g_max >= 5.0 && nh.g_max <= 50.0,
              fmt("g-nihao G_max %.2f outside [5, %.0f]", nh.g_max, 50.0));

    const GainTable t3 = gain_table(grid, kHw, 0.03, SearchlightEval::GainConsistent,
                                    BcDutyModel::TwoBeaconsPlusTurnaround);
    const auto disco3 = find(t3, SlottedProtocol::Disco);
    const auto dc3 = find(t3, SlottedProtocol::OptimalDiffcodes);
    c.note(fmt("3%% column: disco %.1f, diffcodes %.2f", disco3.g_max, dc3.g_max));
    c.require(within(disco3.g_max, 387.5, 0.02), fmt("disco 3%% G_max %.1f vs %.1f", disco3.g_max, 387.5));
    c.require(within(dc3.g_max, 26.8, 0.02), fmt("diffcodes 3%% G_max %.2f vs %.2f", dc3.g_max, 26.8));
}

void criterion_7_bc_overhead() {
    Criterion c("criterion 7: latency cost of blocking compensation");
    const double lo = bc_adjust({0.002}, kHw).bc_dm_increase;
    const double hi = bc_adjust({0.0155}, kHw).bc_dm_increase;
    c.note(fmt("relative dm increase: %.4f at 0.2%%, %.4f at 1.55%%", lo, hi));
    c.require(std::abs(lo - 0.006) <= 0.003, fmt("0.2%%: %.4f vs %.4f +-0.003", lo, 0.006));
    c.require(std::abs(hi - 0.044) <= 0.005, fmt("1.55%%: %.4f vs %.4f +-0.005", hi, 0.044));
}

void criterion_8_collisions() {
    Criterion c("criterion 8: collision probabilities and passive counting");
    const PiParams lo = bc_adjust({0.002}, kHw).params;
    const PiParams hi = bc_adjust({0.0155}, kHw).params;
    c.require(std::abs(collision_prob(3, lo, kHw) - 0.005) <= 0.005,
              fmt("n=3 at 0.2%%: %.4f vs %.4f", collision_prob(3, lo, kHw), 0.005));
    c.require(std::abs(collision_prob(3, hi, kHw) - 0.03) <= 0.005,
              fmt("n=3 at 1.55%%: %.4f vs %.4f", collision_prob(3, hi, kHw), 0.03));
    c.require(std::abs(collision_prob(10, lo, kHw) - 0.02) <= 0.005,
              fmt("n=10 at 0.2%%: %.4f vs %.4f", collision_prob(10, lo, kHw), 0.02));
    c.require(std::abs(collision_prob(10, hi, kHw) - 0.13) <= 0.005,
              fmt("n=10 at 1.55%%: %.4f vs %.4f", collision_prob(10, hi, kHw), 0.13));

    const SchedParamsNs q = quantize_params(hi);
    const CollisionMcResult mc = collision_prob_mc(q, kHw, 3, 10000, 2026);
    const double p = collision_prob(3, hi, kHw);
    const double sigma = std::sqrt(p * (1 - p) / mc.trials);
    c.note(fmt("n=3 counting: %.4f vs formula %.4f", mc.p_hat, p));
    c.require(std::abs(mc.p_hat - p) <= 3 * sigma,
              fmt("counting %.4f not within 3 sigma of %.4f", mc.p_hat, p));
}

void criterion_9_clock_quantization() {
    Criterion c("criterion 9: quantized clock with and without drift correction");
    const auto s = singleint_solve({0.002}, kHw);
    const SchedParamsNs q = quantize_params(s.params);
    const int64_t dm = predicted_dm_ns(q);
    {
        const SweepResult r =
            offset_sweep_oracle(q, q, ClockModel::quantized(32768.0, false, 0), 4 * dm);
        const bool exceeded = !r.bounded || r.worst_latency > dm + dm / 100;
        c.note(fmt("uncorrected worst: %.3f s vs dm %.3f s",
                   r.bounded ? 1e-9 * r.worst_latency : -1.0, 1e-9 * dm));
        c.require(exceeded, "uncorrected clock never exceeded 1.01 dm");
    }
    {
        const SweepResult r =
            offset_sweep_oracle(q, q, ClockModel::quantized(32768.0, true, 5), 4 * dm);
        c.note(fmt("corrected worst: %.3f s vs dm %.3f s", 1e-9 * r.worst_latency, 1e-9 * dm));
        c.require(r.bounded, "corrected clock left an offset undiscovered");
        c.require(r.worst_latency <= dm + dm / 100,
                  fmt("corrected worst %.4f exceeds 1.01 dm %.4f", 1e-9 * r.worst_latency,
                      1.01e-9 * dm));
    }
}

void criterion_10_ble() {
    Criterion c("criterion 10: standard-compliant configuration");
    const BleOverheads oh;
    struct Range {
        double lo, hi;
    };
    // Published per-value ranges over the 2.15%..10% sweep.
    const Range uni_ta{23e-3, 88e-3}, uni_ts{655e-3, 8.990}, uni_ds{35e-3, 99e-3};
    const Range bi_ta{27e-3, 101e-3}, bi_ts{715e-3, 10.241}, bi_ds{38e-3, 112e-3};
    const auto endpoint = [&](BleMode mode, double eta) {
        return ble_solve(eta, oh, mode, kHw);
    };
    const auto check_pt = [&](const char* what, double v, double target) {
        c.require(within(v, target, 0.10), fmt(std::string(what).append(": %.4f vs %.4f +-10%%").c_str(), v, target));
    };
    {
        const BleSolution hi = endpoint(BleMode::NonConnectableUnidir, 0.10);
        const BleSolution lo = endpoint(BleMode::NonConnectableUnidir, 0.0215);
        check_pt("unidir Ta low end", hi.params.ta, uni_ta.lo);
        check_pt("unidir Ta high end", lo.params.ta, uni_ta.hi);
        check_pt("unidir Ts low end", hi.params.ts, uni_ts.lo);
        check_pt("unidir Ts high end", lo.params.ts, uni_ts.hi);
        check_pt("unidir ds low end", hi.ds_configured, uni_ds.lo);
        check_pt("unidir ds high end", lo.ds_configured, uni_ds.hi);
    }
    {
        const BleSolution hi = endpoint(BleMode::ConnectableBidir, 0.10);
        const BleSolution lo = endpoint(BleMode::ConnectableBidir, 0.0215);
        check_pt("bidir Ta low end", hi.params.ta, bi_ta.lo);
        check_pt("bidir Ta high end", lo.params.ta, bi_ta.hi);
        check_pt("bidir Ts low end", hi.params.ts, bi_ts.lo);
        check_pt("bidir Ts high end", lo.params.ts, bi_ts.hi);
        check_pt("bidir ds low end", hi.ds_configured, bi_ds.lo);
        check_pt("bidir ds high end", lo.ds_configured, bi_ds.hi);
    }
    const auto grid = linspace(0.0215, 0.10, 28);
    for (double eta : grid)
        for (BleMode mode : {BleMode::NonConnectableUnidir, BleMode::ConnectableBidir})
            c.require(ble_compliance(ble_solve(eta, oh, mode, kHw)).ok,
                      fmt("lint violation at eta %.4f mode %.0f", eta,
                          mode == BleMode::ConnectableBidir ? 1.0 : 0.0));
    const double uni = ble_vs_ideal_ratio(grid, oh, BleMode::NonConnectableUnidir, kHw);
    const double bi = ble_vs_ideal_ratio(grid, oh, BleMode::ConnectableBidir, kHw);
    c.note(fmt("latency penalty: unidir %.2fx, bidir %.2fx", uni, bi));
    c.require(within(uni, 5.5, 0.15), fmt("unidir penalty %.2f vs 5.5 +-15%% %.0f", uni, 0.0));
    c.require(within(bi, 1.5, 0.15), fmt("bidir penalty %.2f vs 1.5 +-15%% %.0f", bi, 0.0));
}

void criterion_11_grid_search() {
    Criterion c("criterion 11: exhaustive search finds no better parametrization");
    SearchGrid grid; // desk scale: 50 ms steps to 1 s, 240 us beacons
    const GridSearchResult r = grid_search(grid, kHw, 0.5, 2);
    c.note(fmt("cells %.0f, evaluated %.0f", double(r.cells), double(r.evaluated)));
    c.note(fmt("min gap %.4f s, unbounded %.0f", r.min_gap, double(r.unbounded)));
    c.require(r.violations.empty(),
              "violations found: " + std::to_string(r.violations.size()));
    c.require(r.min_gap > 0.0, fmt("min gap %.6f not positive %.0f", r.min_gap, 0.0));

    if (std::getenv("NDOPT_PAPER_GRID") != nullptr) {
        SearchGrid full;
        full.ta_min = full.ts_min = 10e-3;
        full.ta_max = full.ts_max = 5.0;
        full.ta_step = full.ts_step = 10e-3;
        full.ds_step = 10e-3;
        full.budget = 40'000'000'000L;
        const GridSearchResult fr = grid_search(full, kHw, 0.5, 2);
        c.note(fmt("full grid min gap %.4f s over %.0f cells", fr.min_gap, double(fr.cells)));
        c.note(fmt("exact self-matches %.0f, smallest non-identical gap %.6f s",
                   double(fr.exact_matches), fr.min_positive_gap));
        c.require(fr.violations.empty(), "full grid violations");
        // The lattice contains the scheme's own parametrizations, so the
        // closest-candidate distance collapses to zero; the published
        // 165 ms scale is not reproducible under exact duty-cycle matching.
        c.require(fr.min_gap >= 0.05 && fr.min_gap <= 0.5,
                  fmt("full grid min gap %.4f outside [0.05, %.2f]", fr.min_gap, 0.5));
    } else {
        c.note("full-scale grid skipped (set NDOPT_PAPER_GRID=1 to run)");
    }
}

void criterion_12_mean_latency() {
    Criterion c("criterion 12: mean latency at 5% duty-cycle (best effort)");
    HardwareProfile hw = kHw;
    hw.ds_min = 0.1e-3; // sub-millisecond windows are required at 5%
    const MultiIntSolution bc = bc_adjust({0.05}, hw);
    ScenarioConfig cfg;
    cfg.params = quantize_params(bc.params);
    cfg.hw = hw;
    cfg.trials = 20000;
    cfg.master_seed = 7;
    cfg.dm_predicted_ns = seconds_to_ns(bc.dm).ns;

    cfg.mode = SimMode::OneWay;
    const MonteCarloResult one = monte_carlo(cfg);
    cfg.mode = SimMode::TwoWay;
    const MonteCarloResult two = monte_carlo(cfg);
    c.note(fmt("one-way mean %.4f s, two-way mean %.4f s", one.mean_latency_s,
               two.mean_twoway_s));
    c.require(within(one.mean_latency_s, 0.03, 0.25),
              fmt("one-way mean %.4f vs 0.03 +-25%% %.0f", one.mean_latency_s, 0.0));
    c.require(within(two.mean_twoway_s, 0.04, 0.25),
              fmt("two-way mean %.4f vs 0.04 +-25%% %.0f", two.mean_twoway_s, 0.0));
}

} // namespace

int main() {
    criterion_1_parameter_table();
    criterion_2_optimality();
    criterion_3_oracle_vs_formula();
    criterion_4_blocking_probabilities();
    criterion_5_monte_carlo_failure_rate();
    criterion_6_gains();
    criterion_7_bc_overhead();
    criterion_8_collisions();
    criterion_9_clock_quantization();
    criterion_10_ble();
    criterion_11_grid_search();
    criterion_12_mean_latency();
    if (g_failures)
        std::printf("%d criterion(s) failed\n", g_failures);
    else
        std::printf("all criteria passed\n");
    return g_failures == 0 ? 0 : 1;
}
