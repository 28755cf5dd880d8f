#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ndopt/multiint.hpp"
#include "ndopt/time.hpp"

namespace ndopt {

enum class SlottedProtocol { Disco, UConnect, SearchlightStriped, OptimalDiffcodes, GNihao };

inline const char* protocol_name(SlottedProtocol p) {
    switch (p) {
        case SlottedProtocol::Disco: return "disco";
        case SlottedProtocol::UConnect: return "uconnect";
        case SlottedProtocol::SearchlightStriped: return "searchlight";
        case SlottedProtocol::OptimalDiffcodes: return "diffcodes";
        case SlottedProtocol::GNihao: return "gnihao";
    }
    return "?";
}

/// A slotted baseline: protocol identity, slot length, and the G-Nihao
/// shape parameters (its beacon parameter is named nihao_gamma to keep it
/// apart from the MultiInt offset step).
struct SlottedSpec {
    SlottedProtocol protocol = SlottedProtocol::Disco;
    double d_sl = 0.0;
    int nihao_gamma = 2;
    int nihao_m = 33;
};

/// The published Searchlight worst-case row is inconsistent with the gains
/// it is compared under; both readings are provided. GainConsistent uses
/// 2 * ceil(floor(1/eta)/2) * floor(1/eta) slots, which reproduces the
/// comparison tables.
enum class SearchlightEval { PublishedRow, GainConsistent };

/// Worst-case discovery latency of a slotted protocol at duty-cycle eta.
/// Each protocol row is evaluated as published; the G-Nihao row yields a
/// slot count and is scaled by the slot length like the others.
inline double slotted_dm(const SlottedSpec& spec, DutyCycle eta, double da,
                         SearchlightEval se = SearchlightEval::PublishedRow) {
    eta.validate();
    if (spec.d_sl <= 0.0) throw std::invalid_argument("slot length must be positive");
    const double e = eta.eta;
    switch (spec.protocol) {
        case SlottedProtocol::Disco:
            return 4.0 / (e * e) * spec.d_sl;
        case SlottedProtocol::UConnect: {
            const double r = std::sqrt(1.0 / (2.0 * e) + 9.0 / (16.0 * e * e)) + 3.0 / (4.0 * e);
            return r * r * spec.d_sl;
        }
        case SlottedProtocol::SearchlightStriped: {
            const double half = detail::ceil_tol(detail::floor_tol(1.0 / e) / 2.0);
            if (se == SearchlightEval::PublishedRow) return half * spec.d_sl;
            return 2.0 * half * detail::floor_tol(1.0 / e) * spec.d_sl;
        }
        case SlottedProtocol::OptimalDiffcodes:
            return 1.0 / (2.0 * e * e) * spec.d_sl;
        case SlottedProtocol::GNihao: {
            const double g = spec.nihao_gamma;
            const double a = (spec.d_sl + da * g) / (2.0 * g * e * spec.d_sl);
            const double slots = std::pow(a + std::sqrt(a - da / spec.d_sl), 2.0) * g;
            return slots * spec.d_sl;
        }
    }
    throw std::logic_error("unknown protocol");
}

/// Failure model of a slot layout for two devices.
enum class SlotDesign {
    PaddedTwoBeacon, ///< beacon at both slot edges, listen in between (Disco)
    Overflowing,     ///< one beacon+turnaround overflows the slot (Searchlight, Diffcodes)
    NihaoListenBlock ///< m consecutive listen-only slots (G-Nihao)
};

inline double slot_failure_prob(SlotDesign design, double d_sl, const HardwareProfile& hw,
                                int nihao_m = 33) {
    if (d_sl <= 0.0) throw std::invalid_argument("slot length must be positive");
    switch (design) {
        case SlotDesign::PaddedTwoBeacon:
            return 2.0 * (3.0 * hw.da + hw.drt + hw.dtr) / (2.0 * d_sl);
        case SlotDesign::Overflowing:
            return (2.0 * hw.da + hw.dtr) / d_sl;
        case SlotDesign::NihaoListenBlock:
            return (hw.drt + hw.dtr + 2.0 * hw.da) / (nihao_m * d_sl);
    }
    throw std::logic_error("unknown slot design");
}

/// Slot length at which a layout reaches a target failure probability
/// (exact inversion of slot_failure_prob).
inline double calibrate_slot(SlotDesign design, double target_p, const HardwareProfile& hw,
                             int nihao_m = 33) {
    if (!(target_p > 0.0 && target_p < 1.0))
        throw std::invalid_argument("target failure probability must lie in (0, 1)");
    switch (design) {
        case SlotDesign::PaddedTwoBeacon:
            return (3.0 * hw.da + hw.drt + hw.dtr) / target_p;
        case SlotDesign::Overflowing:
            return (2.0 * hw.da + hw.dtr) / target_p;
        case SlotDesign::NihaoListenBlock:
            return (hw.drt + hw.dtr + 2.0 * hw.da) / (nihao_m * target_p);
    }
    throw std::logic_error("unknown slot design");
}

struct GainRow {
    double eta = 0.0;
    SlottedProtocol protocol{};
    double d_sl = 0.0;
    double dm_protocol = 0.0;
    double dm_reference = 0.0;
    double gain = 0.0;
};

struct GainSummary {
    SlottedProtocol protocol{};
    double d_sl = 0.0;
    double g_max = 0.0;
    double g_mean = 0.0;
};

struct GainTable {
    std::vector<GainRow> rows;
    std::vector<GainSummary> summary;
    SearchlightEval searchlight_eval = SearchlightEval::PublishedRow;
    BcDutyModel bc_model = BcDutyModel::TwoBeaconsPlusTurnaround;
};

inline std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v;
    v.reserve(n);
    if (n == 1) {
        v.push_back(lo);
        return v;
    }
    for (int i = 0; i < n; ++i) v.push_back(lo + (hi - lo) * i / (n - 1));
    return v;
}

/// Gains of the blocking-compensated MultiInt scheme over the slotted
/// baselines: G(eta) = dm_protocol(eta) / dm_reference(eta), with slot
/// lengths calibrated to target_p (U-Connect keeps its fixed 250 us slots)
/// and the reference latency taken from bc_adjust at each grid point.
inline GainTable gain_table(const std::vector<double>& eta_grid, const HardwareProfile& hw,
                            double target_p,
                            SearchlightEval se = SearchlightEval::PublishedRow,
                            BcDutyModel bc_model = BcDutyModel::TwoBeaconsPlusTurnaround,
                            int nihao_gamma = 2, int nihao_m = 33) {
    GainTable t;
    t.searchlight_eval = se;
    t.bc_model = bc_model;

    std::vector<double> reference;
    reference.reserve(eta_grid.size());
    for (double e : eta_grid) reference.push_back(bc_adjust({e}, hw, bc_model).dm);

    const struct {
        SlottedProtocol protocol;
        double d_sl;
    } entries[] = {
        {SlottedProtocol::Disco, calibrate_slot(SlotDesign::PaddedTwoBeacon, target_p, hw)},
        {SlottedProtocol::SearchlightStriped, calibrate_slot(SlotDesign::Overflowing, target_p, hw)},
        {SlottedProtocol::OptimalDiffcodes, calibrate_slot(SlotDesign::Overflowing, target_p, hw)},
        {SlottedProtocol::GNihao,
         calibrate_slot(SlotDesign::NihaoListenBlock, target_p, hw, nihao_m)},
        {SlottedProtocol::UConnect, 250e-6},
    };

    for (const auto& entry : entries) {
        SlottedSpec spec{entry.protocol, entry.d_sl, nihao_gamma, nihao_m};
        GainSummary sum{entry.protocol, entry.d_sl, 0.0, 0.0};
        for (size_t i = 0; i < eta_grid.size(); ++i) {
            GainRow row;
            row.eta = eta_grid[i];
            row.protocol = entry.protocol;
            row.d_sl = entry.d_sl;
            row.dm_protocol = slotted_dm(spec, {eta_grid[i]}, hw.da, se);
            row.dm_reference = reference[i];
            row.gain = row.dm_protocol / row.dm_reference;
            sum.g_max = std::max(sum.g_max, row.gain);
            sum.g_mean += row.gain;
            t.rows.push_back(row);
        }
        sum.g_mean /= static_cast<double>(eta_grid.size());
        t.summary.push_back(sum);
    }
    return t;
}

} // namespace ndopt
