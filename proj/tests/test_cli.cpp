#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

struct RunResult {
    int status = -1;
    std::string out;
};

RunResult run(const std::string& args) {
    const std::string cmd = std::string(NDOPT_CLI_PATH) + " " + args + " 2>/dev/null";
    std::array<char, 4096> buf{};
    RunResult r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
    const int rc = pclose(p);
    r.status = WEXITSTATUS(rc);
    return r;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("param emits the published 0.55% row") {
    const RunResult r = run("param --scheme singleint --eta 0.0055");
    REQUIRE(r.status == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(std::abs(j["Ta"].get<double>() - 0.0117) <= 1e-4);
    CHECK(std::abs(j["Ts"].get<double>() - 4.2430) <= 1e-4);
    CHECK(std::abs(j["ds"].get<double>() - 0.0117) <= 1e-4);
    CHECK(std::abs(j["eta_achieved"].get<double>() - 0.0055) <= 1e-9);
}

TEST_CASE("param handles the multi-interval scheme") {
    const RunResult r = run("param --scheme multiint2 --eta 0.012");
    REQUIRE(r.status == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(std::abs(j["Ta"].get<double>() - 0.0054) <= 1e-4);
    CHECK(std::abs(j["Ts"].get<double>() - 0.3016) <= 1e-4);
    CHECK(std::abs(j["ds"].get<double>() - 0.0018) <= 1e-4);
}

TEST_CASE("percent duty-cycles are accepted") {
    const RunResult r = run("param --scheme singleint --eta 0.55%");
    REQUIRE(r.status == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(std::abs(j["Ts"].get<double>() - 4.2430) <= 1e-4);
}

TEST_CASE("infeasible duty-cycle exits 3") {
    CHECK(run("param --scheme singleint --eta 0.99 --ds-min 1ms").status == 3);
}

TEST_CASE("usage errors exit 2") {
    CHECK(run("param --scheme nosuch --eta 0.01").status == 2);
    CHECK(run("param").status == 2);
    CHECK(run("param --scheme singleint --eta 0.01 --da 32").status == 2); // no unit
    CHECK(run("param --scheme singleint --eta 2").status == 2); // needs % or fraction
}

TEST_CASE("bound reports the 1.28 s point as optimal") {
    const RunResult r = run("bound --eta 0.01 --assert-equal");
    REQUIRE(r.status == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["bound"].get<double>() == doctest::Approx(1.28).epsilon(1e-9));
    CHECK(j["optimal"].get<bool>());
}

TEST_CASE("simulate is byte-reproducible") {
    const std::string prefix = "cli_sim";
    const std::string cmd =
        "simulate --scheme singleint --eta 0.05 --mode oneway --trials 5 --seed 7 --out " +
        prefix;
    REQUIRE(run(cmd).status == 0);
    const std::string first = slurp(prefix + ".csv");
    REQUIRE(run(cmd).status == 0);
    CHECK(first == slurp(prefix + ".csv"));
    CHECK(!first.empty());
    std::remove((prefix + ".csv").c_str());
    std::remove((prefix + ".json").c_str());
}

TEST_CASE("sweep honors the analytic bound") {
    const RunResult r =
        run("sweep --scheme singleint --eta 0.0155 --assert-bound");
    CHECK(r.status == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["bounded"].get<bool>());
    CHECK(j["worst_latency"].get<double>() <= j["dm_analytic"].get<double>() * (1 + 1e-12));
}

TEST_CASE("sweep flags the uncorrected clock and clears the corrected one") {
    CHECK(run("sweep --scheme singleint --eta 1.55% --clock quantized "
              "--no-q-correction --ds-ext-ticks 0 --assert-bound").status == 4);
    CHECK(run("sweep --scheme singleint --eta 1.55% --clock quantized --assert-bound")
              .status == 0);
}

TEST_CASE("ble emits a compliant configuration") {
    const RunResult r = run("ble --eta-joint 0.05 --mode unidir");
    REQUIRE(r.status == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["compliant"].get<bool>());
    const double ta = j["advInterval_ms"].get<double>();
    CHECK(ta >= 20.0);
    CHECK(ta <= 10240.0);
    CHECK(j["scanWindow_ms"].get<double>() >= 2.5);
}

TEST_CASE("compare emits per-protocol rows for a single duty-cycle") {
    const std::string out = "cli_gain.csv";
    const RunResult r = run("compare --eta 0.005 --pblk 0.19% --out " + out);
    REQUIRE(r.status == 0);
    const std::string csv = slurp(out);
    CHECK(csv.find("disco") != std::string::npos);
    CHECK(csv.find("uconnect") != std::string::npos);
    CHECK(csv.find("gnihao") != std::string::npos);
    int lines = 0;
    for (char c : csv) lines += c == '\n';
    CHECK(lines == 7); // comment + header + 5 protocols
    std::remove(out.c_str());
}

TEST_CASE("hardware profile file feeds the solver") {
    const std::string path = "cli_profile.json";
    {
        std::ofstream out(path);
        out << R"({"da_us": 240.0, "ds_min_us": 2000.0})";
    }
    const RunResult r = run("param --scheme singleint --eta 0.01 --profile " + path);
    REQUIRE(r.status == 0);
    const auto j = nlohmann::json::parse(r.out);
    // Window scales with the beacon duration: 7.5x the 32 us profile's value.
    CHECK(j["ds"].get<double>() == doctest::Approx(0.024).epsilon(0.05));
    std::remove(path.c_str());
}

TEST_CASE("search on a tiny grid reports a positive margin") {
    const RunResult r = run("search --ta 100ms:400ms:100ms --ts 100ms:400ms:100ms "
                            "--ds-step 100ms --da 240us");
    REQUIRE(r.status == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["violations"].get<long>() == 0);
}
