// commands.hpp
//
// The `run`, `sweep` and `bound` commands behind the anchor_bandits CLI.
// Each returns a process exit code: 0 success, 2 configuration error,
// 3 runtime failure.
#pragma once

#include "analysis.hpp"
#include "config.hpp"
#include "output.hpp"
#include "simulator.hpp"

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace anchor_bandits {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

/// Worker cap from ANCHOR_BANDITS_THREADS; unset, empty or 0 means all cores.
inline unsigned threads_from_env() {
    const char* s = std::getenv("ANCHOR_BANDITS_THREADS");
    if (s == nullptr || *s == '\0') return 0;
    char* end = nullptr;
    const unsigned long v = std::strtoul(s, &end, 10);
    if (end == s || *end != '\0') return 0;
    return static_cast<unsigned>(v);
}

struct RunOptions {
    std::filesystem::path config;
    std::filesystem::path out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> runs;
    std::optional<std::uint64_t> horizon;
    unsigned threads{0};
};

struct SweepOptions {
    std::filesystem::path config;
    std::string param;
    std::vector<std::string> values;
    std::filesystem::path out_dir;
    unsigned threads{0};
};

struct BoundOptions {
    std::filesystem::path config;
    std::filesystem::path out_dir{"."};
    BoundParams params{};
};

namespace detail {

inline void apply_overrides(ConfigFile& c, const RunOptions& o) {
    if (o.seed) c.seed = *o.seed;
    if (o.runs) {
        if (*o.runs == 0) throw ConfigError("--runs must be >= 1");
        c.runs = *o.runs;
    }
    if (o.horizon) {
        if (*o.horizon == 0) throw ConfigError("--horizon must be >= 1");
        c.horizon = *o.horizon;
    }
}

// Runs one resolved config and writes its bundle. Returns the exit code.
inline int execute_and_write(const ConfigFile& file, const std::filesystem::path& out_dir,
                             unsigned threads, std::ostream& log) {
    const ExperimentConfig config = resolve(file);
    for (const auto& w : config.instance.bias_warnings()) log << "warning: " << w << "\n";
    const ExperimentResult result = run_experiment(config, threads);
    write_bundle(out_dir, config, result, file.v_bounds.describe());
    if (!result.failures.empty()) {
        for (const auto& f : result.failures) {
            log << "error: " << policy_name(f.policy) << " run " << f.run_index << ": " << f.message << "\n";
        }
        log << "error: " << result.failures.size() << " run(s) failed; aggregates use completed runs only\n";
        return kExitRuntime;
    }
    return kExitOk;
}

inline double parse_sweep_number(const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ConfigError("sweep value '" + text + "' is not a number");
    }
    if (used != text.size()) throw ConfigError("sweep value '" + text + "' is not a number");
    return v;
}

}  // namespace detail

/// Splits "[0, 0.1,0.3]" or "0,0.1,0.3" (possibly given as several
/// arguments) into individual value strings.
inline std::vector<std::string> split_values(const std::vector<std::string>& args) {
    std::vector<std::string> out;
    for (std::string a : args) {
        for (char& ch : a) {
            if (ch == '[' || ch == ']') ch = ',';
        }
        std::stringstream ss(a);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto b = item.find_first_not_of(" \t");
            if (b == std::string::npos) continue;
            const auto e = item.find_last_not_of(" \t");
            out.push_back(item.substr(b, e - b + 1));
        }
    }
    return out;
}

inline int cmd_run(const RunOptions& opts, std::ostream& log) {
    try {
        ConfigFile file = load_config(opts.config);
        detail::apply_overrides(file, opts);
        return detail::execute_and_write(file, opts.out_dir, opts.threads, log);
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        log << "runtime error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

inline int cmd_sweep(const SweepOptions& opts, std::ostream& log) {
    try {
        const auto param = parse_sweep_param(opts.param);
        if (!param) {
            throw ConfigError("unknown sweep parameter '" + opts.param +
                              "' (valid: offline_total, delta, v, K)");
        }
        const std::vector<std::string> values = split_values(opts.values);
        if (values.empty()) throw ConfigError("--values must list at least one value");
        const ConfigFile base = load_config(opts.config);

        // Validate every point before running any of them.
        std::vector<std::pair<double, ConfigFile>> points;
        for (const auto& text : values) {
            const double v = detail::parse_sweep_number(text);
            ConfigFile derived = apply_sweep_value(base, *param, v);
            (void)resolve(derived);
            points.emplace_back(v, std::move(derived));
        }

        Json index;
        index["param"] = std::string(sweep_param_name(*param));
        Json entries = Json::array();
        int status = kExitOk;
        for (const auto& [value, cfg] : points) {
            const std::string dir_name = std::string(sweep_param_name(*param)) + "_" + format_real(value);
            log << "sweep " << sweep_param_name(*param) << " = " << format_real(value) << "\n";
            const int rc = detail::execute_and_write(cfg, opts.out_dir / dir_name, opts.threads, log);
            if (rc != kExitOk) status = rc;
            entries.push_back({{"value", value}, {"dir", dir_name}});
        }
        index["entries"] = entries;
        std::filesystem::create_directories(opts.out_dir);
        write_text_file(opts.out_dir / "sweep_index.json", index.dump(2) + "\n");
        return status;
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        log << "runtime error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

inline Json bound_json(const BoundReport& rep, const ExperimentConfig& config, const BoundParams& params) {
    Json j;
    j["horizon"] = config.horizon;
    j["optimal_arm"] = rep.optimal_arm + 1;
    j["optimal_arm_constant"] = rep.optimal_arm_constant;
    j["params"] = {{"suboptimal_scale", params.suboptimal_scale},
                   {"suboptimal_log_offset", params.suboptimal_log_offset},
                   {"optimal_scale", params.optimal_scale},
                   {"optimal_log_offset", params.optimal_log_offset},
                   {"constant_term", params.constant_term},
                   {"use_optimal_arm_constant", params.use_optimal_arm_constant}};
    Json arms = Json::array();
    for (std::size_t i = 0; i < rep.arms.size(); ++i) {
        const auto& a = rep.arms[i];
        arms.push_back({{"arm", i + 1},
                        {"gap", a.gap},
                        {"omega", a.omega},
                        {"n_off", a.n_off},
                        {"contribution", a.contribution}});
    }
    j["arms"] = arms;
    j["total"] = rep.total;
    return j;
}

inline int cmd_bound(const BoundOptions& opts, std::ostream& out, std::ostream& log) {
    try {
        const ConfigFile file = load_config(opts.config);
        const ExperimentConfig config = resolve(file);
        const auto counts = allocate_offline_counts(config.offline_total, config.instance.num_arms(), config.coverage);
        const BoundReport rep = regret_upper_bound_report(config.instance, counts, config.horizon, opts.params);

        out << std::left << std::setw(6) << "arm" << std::setw(14) << "gap" << std::setw(14) << "omega"
            << std::setw(10) << "N" << "contribution\n";
        for (std::size_t i = 0; i < rep.arms.size(); ++i) {
            const auto& a = rep.arms[i];
            out << std::left << std::setw(6) << i + 1 << std::setw(14) << format_real(a.gap) << std::setw(14)
                << format_real(a.omega) << std::setw(10) << a.n_off << format_real(a.contribution) << "\n";
        }
        out << "total " << format_real(rep.total) << "  (T = " << config.horizon << ")\n";

        std::filesystem::create_directories(opts.out_dir);
        write_text_file(opts.out_dir / "bound.json", bound_json(rep, config, opts.params).dump(2) + "\n");
        return kExitOk;
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        log << "runtime error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

}  // namespace anchor_bandits
