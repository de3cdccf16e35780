// output.hpp
//
// On-disk result formats.
//
//   curves.csv   algorithm,run,round,cum_regret     one row per run checkpoint
//   summary.csv  algorithm,round,mean_regret,stderr one row per policy checkpoint
//   meta.json    resolved config, seed, per-arm parameters, warnings
//
// CSV: UTF-8, LF line endings, '.' decimal point. Reals use the shortest
// representation that round-trips to the same double, so identical results
// serialize to identical bytes.
#pragma once

#include "config.hpp"
#include "simulator.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <system_error>

namespace anchor_bandits {

inline constexpr std::string_view kToolVersion = "0.1.0";

inline std::string format_real(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    if (res.ec != std::errc{}) throw std::runtime_error("format_real: conversion failed");
    return std::string(buf, res.ptr);
}

inline std::string curves_csv(const ExperimentResult& result) {
    std::string out = "algorithm,run,round,cum_regret\n";
    for (const auto& run : result.runs) {
        const std::string name(policy_name(run.policy));
        const std::string idx = std::to_string(run.run_index);
        for (const auto& cp : run.checkpoints) {
            out += name;
            out += ',';
            out += idx;
            out += ',';
            out += std::to_string(cp.round);
            out += ',';
            out += format_real(cp.cum_regret);
            out += '\n';
        }
    }
    return out;
}

inline std::string summary_csv(const ExperimentResult& result) {
    std::string out = "algorithm,round,mean_regret,stderr\n";
    for (const auto& agg : result.aggregates) {
        const std::string name(policy_name(agg.policy));
        for (const auto& p : agg.points) {
            out += name + ',' + std::to_string(p.round) + ',' + format_real(p.mean) + ',' +
                   format_real(p.std_error) + '\n';
        }
    }
    return out;
}

inline Json meta_json(const ExperimentConfig& config, const ExperimentResult& result,
                      const std::string& v_rule) {
    Json j;
    j["tool"] = "anchor_bandits";
    j["version"] = std::string(kToolVersion);
    j["master_seed"] = config.master_seed.value;
    j["config"] = resolved_config_json(config);
    j["v_rule"] = v_rule;
    const GapInfo gaps = suboptimality_gaps(config.instance);
    j["optimal_arm"] = gaps.optimal_arm + 1;
    Json arms = Json::array();
    for (std::size_t i = 0; i < config.instance.num_arms(); ++i) {
        const auto& a = config.instance.arm(i);
        arms.push_back({{"arm", i + 1},
                        {"mu_on", a.mu_on},
                        {"mu_off", a.mu_off},
                        {"v_bound", a.v_bound},
                        {"n_off", result.offline_counts.at(i)},
                        {"gap", gaps.gaps[i]},
                        {"bias_within_bound", a.bias_within_bound()}});
    }
    j["arms"] = arms;
    j["warnings"] = config.instance.bias_warnings();
    Json completed = Json::object();
    for (const auto& agg : result.aggregates) completed[std::string(policy_name(agg.policy))] = agg.runs;
    j["runs_completed"] = completed;
    Json failures = Json::array();
    for (const auto& f : result.failures) {
        failures.push_back({{"algorithm", std::string(policy_name(f.policy))},
                            {"run", f.run_index},
                            {"error", f.message}});
    }
    j["failures"] = failures;
    return j;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

inline void write_bundle(const std::filesystem::path& dir, const ExperimentConfig& config,
                         const ExperimentResult& result, const std::string& v_rule) {
    std::filesystem::create_directories(dir);
    write_text_file(dir / "curves.csv", curves_csv(result));
    write_text_file(dir / "summary.csv", summary_csv(result));
    write_text_file(dir / "meta.json", meta_json(config, result, v_rule).dump(2) + "\n");
}

}  // namespace anchor_bandits
