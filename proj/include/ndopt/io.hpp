#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ndopt/time.hpp"
#include "ndopt/version.hpp"

namespace ndopt::io {

using nlohmann::json;

/// Hardware profile from a JSON document; absent keys keep their defaults.
inline HardwareProfile profile_from_json(const json& j) {
    HardwareProfile hw;
    if (j.contains("da_us")) hw.da = j.at("da_us").get<double>() * 1e-6;
    if (j.contains("ds_min_us")) hw.ds_min = j.at("ds_min_us").get<double>() * 1e-6;
    if (j.contains("drt_us")) hw.drt = j.at("drt_us").get<double>() * 1e-6;
    if (j.contains("dtr_us")) hw.dtr = j.at("dtr_us").get<double>() * 1e-6;
    if (j.contains("fclk_hz")) hw.f_clk = j.at("fclk_hz").get<double>();
    if (j.contains("alpha")) hw.alpha = j.at("alpha").get<double>();
    hw.validate();
    return hw;
}

inline HardwareProfile load_profile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open profile: " + path);
    json j;
    in >> j;
    return profile_from_json(j);
}

inline json profile_to_json(const HardwareProfile& hw) {
    return json{{"da_us", hw.da * 1e6},     {"ds_min_us", hw.ds_min * 1e6},
                {"drt_us", hw.drt * 1e6},   {"dtr_us", hw.dtr * 1e6},
                {"fclk_hz", hw.f_clk},      {"alpha", hw.alpha}};
}

/// FNV-1a over the canonical profile serialization.
inline std::string profile_hash(const HardwareProfile& hw) {
    const std::string s = profile_to_json(hw).dump();
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// Reproducibility record embedded in every result file. The deterministic
/// part excludes wall-clock fields so repeated runs emit identical bytes.
struct RunManifest {
    std::string command;
    std::string args;
    std::string profile;      ///< profile_hash()
    uint64_t master_seed = 0;
    std::string version = kVersion;
    std::string started;      ///< wall clock; omitted from deterministic output
    std::string finished;

    json to_json(bool with_timestamps = true) const {
        json j{{"command", command}, {"args", args},       {"profile", profile},
               {"seed", master_seed}, {"version", version}};
        if (with_timestamps && !started.empty()) {
            j["started"] = started;
            j["finished"] = finished;
        }
        return j;
    }

    /// One-line form for CSV/SVG comments; deterministic.
    std::string comment_line() const {
        return "ndopt " + std::string(kVersion) + " | " + command + " " + args +
               " | profile=" + profile + " | seed=" + std::to_string(master_seed);
    }
};

/// Write through a temp file and rename, so readers never observe a
/// partially written result.
inline void atomic_write(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write: " + tmp);
        out << content;
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("cannot rename into place: " + path);
}

} // namespace ndopt::io
