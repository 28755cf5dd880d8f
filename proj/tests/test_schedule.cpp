#include <doctest.h>

#include <cmath>

#include "ndopt/multiint.hpp"
#include "ndopt/sim/schedule.hpp"
#include "ndopt/singleint.hpp"

using namespace ndopt;
using namespace ndopt::sim;

namespace {
const HardwareProfile kHw;
}

TEST_CASE("quantized parameters keep the scheme identities exactly") {
    SUBCASE("single-interval") {
        const auto s = singleint_solve({0.002}, kHw);
        const SchedParamsNs q = quantize_params(s.params);
        CHECK(q.ta == q.ds - q.da);
        CHECK(q.ts == (q.m + 1) * q.ta);
    }
    SUBCASE("multi-interval") {
        const auto s = multiint_solve({0.0155}, 2, kHw);
        const SchedParamsNs q = quantize_params(s.params);
        CHECK(static_cast<int64_t>(q.k_c) * q.ta == q.ts + (q.ds - q.da));
    }
    SUBCASE("hand-built parameters without the structure are rejected") {
        PiParams p;
        p.ta = 5e-3;
        p.ts = 10e-3;
        p.ds = 10e-3;
        p.da = 32e-6;
        CHECK_THROWS_AS(quantize_params(p), std::invalid_argument);
    }
    SUBCASE("scan-interval safety margin removes one tick") {
        const auto s = singleint_solve({0.002}, kHw);
        const SchedParamsNs plain = quantize_params(s.params);
        const SchedParamsNs margin = quantize_params(s.params, true);
        CHECK(plain.ts - margin.ts == 30518); // one 32768 Hz tick, in ns
    }
}

TEST_CASE("ideal schedule is the exact periodic grid") {
    SchedParamsNs q;
    q.ta = 32'000'000;
    q.ts = 100'000'000;
    q.ds = 5'000'000;
    q.da = 32'000;
    const DeviceSchedule d = gen_schedule(q, ClockModel::ideal(), 0, 0, 100'000'000);
    REQUIRE(d.beacons.size() == 4);
    CHECK(d.beacons[0] == 0);
    CHECK(d.beacons[1] == 32'000'000);
    CHECK(d.beacons[2] == 64'000'000);
    CHECK(d.beacons[3] == 96'000'000);
}

TEST_CASE("quantization error accumulates without correction") {
    SchedParamsNs q;
    q.ta = 32'000'000; // 1048.576 ticks -> rounds to 1049
    q.ts = 1;
    q.ds = 1;
    q.da = 0;
    const auto clock = ClockModel::quantized(32768.0, false, 0);
    const DeviceSchedule d =
        gen_schedule(q, clock, 0, 0, 33'000'000'000, {true, false});
    REQUIRE(d.beacons.size() > 1000);
    const int64_t dev = d.beacons[1000] - 1000 * q.ta;
    // 1000 * (1049 ticks - 32 ms) = 1000 * 12939.45 ns of drift.
    CHECK(dev == doctest::Approx(12'939'453).epsilon(1e-6));
    CHECK(std::abs(dev) > 10'000'000);
}

TEST_CASE("correction keeps every beacon within one tick of nominal") {
    SchedParamsNs q;
    q.ta = 32'032'000;
    q.ts = 1;
    q.ds = 1;
    q.da = 0;
    const auto clock = ClockModel::quantized(32768.0, true, 0);
    const DeviceSchedule d =
        gen_schedule(q, clock, 0, 0, 33'000'000'000, {true, false});
    REQUIRE(d.beacons.size() > 1000);
    for (size_t k = 0; k < d.beacons.size(); ++k) {
        const int64_t dev = d.beacons[k] - static_cast<int64_t>(k) * q.ta;
        CHECK(std::abs(dev) <= 30'518); // one 32768 Hz tick
    }
}

TEST_CASE("window length gains the extension ticks") {
    SchedParamsNs q;
    q.ta = 32'000'000;
    q.ts = 100'000'000;
    q.ds = 5'000'000;
    q.da = 32'000;
    const auto clock = ClockModel::quantized(32768.0, true, 5);
    const DeviceSchedule d = gen_schedule(q, clock, 0, 0, 400'000'000, {false, true});
    REQUIRE(!d.windows.empty());
    // 5 ms -> 164 ticks (163.84 rounded up? half-up: 164) plus 5 extension ticks.
    const int64_t expect = (169LL * 1'000'000'000 + 16384) / 32768;
    CHECK(d.windows[0].len == expect);
}

TEST_CASE("blocking compensation edits the beacon train") {
    HardwareProfile hw = kHw; // 140 us turnarounds, 32 us beacons
    DeviceSchedule d;
    d.da = 32'000;
    d.windows.push_back({1'000'000'000, 10'700'000});

    SUBCASE("clean window gains exactly the two bracketing beacons") {
        for (int i = 0; i < 10; ++i) d.beacons.push_back(100'000'000 + i * 32'100'000);
        const DeviceSchedule out = apply_bc(d, hw);
        CHECK(out.beacons.size() == d.beacons.size() + 2);
        const int64_t before = 1'000'000'000 - 140'000 - 32'000;
        const int64_t after = 1'000'000'000 + 10'700'000 + 140'000;
        CHECK(std::count(out.beacons.begin(), out.beacons.end(), before) == 1);
        CHECK(std::count(out.beacons.begin(), out.beacons.end(), after) == 1);
    }
    SUBCASE("beacons inside the widened window are suppressed") {
        d.beacons = {999'828'001, 1'005'000'000, 1'010'839'999};
        const DeviceSchedule out = apply_bc(d, hw);
        // All three suppressed; only the two compensation beacons remain.
        CHECK(out.beacons.size() == 2);
    }
    SUBCASE("boundary beacons survive and deduplicate the compensation") {
        d.beacons = {999'828'000, 1'010'840'000};
        const DeviceSchedule out = apply_bc(d, hw);
        CHECK(out.beacons == d.beacons);
    }
}

TEST_CASE("exact duty accounting of a compensated schedule") {
    const MultiIntSolution s = multiint_solve({0.0155}, 2, kHw);
    PiParams p = s.params;
    p.bc_enabled = true;
    const double eta = bc_exact_duty_cycle(p, kHw);
    // Phase-zero steady state: of every 3 windows, 2 suppress one regular
    // beacon each; 6 compensation beacons join. Net +4/3 beacons per Ts.
    const double expect = 0.0155 + (4.0 / 3.0) * kHw.da / s.params.ts;
    CHECK(eta == doctest::Approx(expect).epsilon(2e-4));
}
