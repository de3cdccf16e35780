// config.hpp
//
// JSON experiment configuration: parsing, validation, resolution into an
// ExperimentConfig, and the resolved (list-form) document written to
// meta.json. A resolved document fed back through parse_config reproduces the
// same experiment.
//
// Accepted keys (unknown keys are rejected):
//   K                        number of arms (required unless mu_on is a list)
//   mu_on                    list, or use optimal_mean + suboptimal_mean (arm 1 optimal)
//   optimal_mean, suboptimal_mean
//   mu_off                   list; or delta / suboptimal_off_mean; default mu_off = mu_on
//   delta                    mu_off[optimal] = mu_on[optimal] - delta
//   suboptimal_off_mean      mu_off of every non-optimal arm
//   v_bounds                 list | number | "true_bias" | {"max_of_true_and": x}
//   reward_family            "gaussian" | "bernoulli" | {"kind": "gaussian", "sigma": s}
//   coverage                 "uniform" | {"kind": "heavy_on_arm", "arm": i (1-based), "fraction": f}
//   offline_total, policies, radius_scale, horizon, runs, seed, stride,
//   redraw_offline_per_run
#pragma once

#include "environment.hpp"
#include "policies.hpp"
#include "simulator.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace anchor_bandits {

using Json = nlohmann::ordered_json;

/// Invalid or unreadable configuration. Maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct VBoundRule {
    enum class Mode { List, Fixed, TrueBias, MaxOfTrueAnd };
    Mode mode{Mode::TrueBias};
    double value{0.0};
    std::vector<double> list;

    std::string describe() const {
        std::ostringstream os;
        switch (mode) {
            case Mode::List: return "list";
            case Mode::Fixed: os << "fixed " << value; return os.str();
            case Mode::TrueBias: return "true_bias";
            case Mode::MaxOfTrueAnd: os << "max_of_true_and " << value; return os.str();
        }
        return "unknown";
    }
};

struct ConfigFile {
    std::optional<std::uint64_t> num_arms;
    std::optional<std::vector<double>> mu_on;
    std::optional<double> optimal_mean;
    std::optional<double> suboptimal_mean;
    std::optional<std::vector<double>> mu_off;
    std::optional<double> delta;
    std::optional<double> suboptimal_off_mean;
    VBoundRule v_bounds{};
    RewardFamily reward_family = RewardFamily::gaussian(1.0);
    CoveragePattern coverage = CoveragePattern::uniform();
    std::uint64_t offline_total{0};
    std::vector<PolicyKind> policies{kAllPolicies.begin(), kAllPolicies.end()};
    double radius_scale{2.0};
    std::uint64_t horizon{10000};
    std::uint64_t runs{50};
    std::uint64_t seed{0};
    std::uint64_t stride{10};
    bool redraw_offline_per_run{true};
};

namespace detail {

inline double get_real(const Json& j, const std::string& key) {
    if (!j.is_number()) throw ConfigError("config key '" + key + "': expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError("config key '" + key + "': must be finite");
    return v;
}

inline std::uint64_t get_count(const Json& j, const std::string& key) {
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    if (j.is_number_integer()) {
        throw ConfigError("config key '" + key + "': must be a non-negative integer");
    }
    if (j.is_number_float()) {
        const double d = j.get<double>();
        if (d >= 0.0 && d == std::floor(d) && d < 1.8e19) return static_cast<std::uint64_t>(d);
    }
    throw ConfigError("config key '" + key + "': expected a non-negative integer");
}

inline std::vector<double> get_real_list(const Json& j, const std::string& key) {
    if (!j.is_array()) throw ConfigError("config key '" + key + "': expected a list of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(get_real(j[i], key + "[" + std::to_string(i) + "]"));
    }
    return out;
}

inline void reject_unknown(const Json& obj, const std::set<std::string>& allowed, const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key())) {
            throw ConfigError("unknown config key '" + where + it.key() + "'");
        }
    }
}

inline VBoundRule parse_v_rule(const Json& j) {
    VBoundRule rule;
    if (j.is_array()) {
        rule.mode = VBoundRule::Mode::List;
        rule.list = get_real_list(j, "v_bounds");
        for (double v : rule.list) {
            if (v < 0.0) throw ConfigError("config key 'v_bounds': entries must be >= 0");
        }
    } else if (j.is_number()) {
        rule.mode = VBoundRule::Mode::Fixed;
        rule.value = get_real(j, "v_bounds");
    } else if (j.is_string() && j.get<std::string>() == "true_bias") {
        rule.mode = VBoundRule::Mode::TrueBias;
    } else if (j.is_object()) {
        reject_unknown(j, {"max_of_true_and"}, "v_bounds.");
        if (!j.contains("max_of_true_and")) {
            throw ConfigError("config key 'v_bounds': object form needs 'max_of_true_and'");
        }
        rule.mode = VBoundRule::Mode::MaxOfTrueAnd;
        rule.value = get_real(j["max_of_true_and"], "v_bounds.max_of_true_and");
    } else {
        throw ConfigError(
            "config key 'v_bounds': expected a list, a number, \"true_bias\" or {\"max_of_true_and\": x}");
    }
    if (rule.mode != VBoundRule::Mode::List && rule.value < 0.0) {
        throw ConfigError("config key 'v_bounds': value must be >= 0");
    }
    return rule;
}

inline RewardFamily parse_family(const Json& j) {
    std::string kind;
    double sigma = 1.0;
    if (j.is_string()) {
        kind = j.get<std::string>();
    } else if (j.is_object()) {
        reject_unknown(j, {"kind", "sigma"}, "reward_family.");
        if (!j.contains("kind") || !j["kind"].is_string()) {
            throw ConfigError("config key 'reward_family.kind': expected \"gaussian\" or \"bernoulli\"");
        }
        kind = j["kind"].get<std::string>();
        if (j.contains("sigma")) sigma = get_real(j["sigma"], "reward_family.sigma");
    } else {
        throw ConfigError("config key 'reward_family': expected a string or object");
    }
    if (kind == "gaussian") {
        if (sigma < 0.0) throw ConfigError("config key 'reward_family.sigma': must be >= 0");
        return RewardFamily::gaussian(sigma);
    }
    if (kind == "bernoulli") {
        if (j.is_object() && j.contains("sigma")) {
            throw ConfigError("config key 'reward_family.sigma': not allowed for bernoulli");
        }
        return RewardFamily::bernoulli();
    }
    throw ConfigError("config key 'reward_family': unknown kind '" + kind + "'");
}

inline CoveragePattern parse_coverage(const Json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "uniform") return CoveragePattern::uniform();
        throw ConfigError("config key 'coverage': unknown pattern '" + j.get<std::string>() + "'");
    }
    if (!j.is_object()) throw ConfigError("config key 'coverage': expected a string or object");
    reject_unknown(j, {"kind", "arm", "fraction"}, "coverage.");
    const std::string kind = j.contains("kind") && j["kind"].is_string() ? j["kind"].get<std::string>() : "";
    if (kind == "uniform") {
        if (j.contains("arm") || j.contains("fraction")) {
            throw ConfigError("config key 'coverage': uniform takes no arm/fraction");
        }
        return CoveragePattern::uniform();
    }
    if (kind != "heavy_on_arm") {
        throw ConfigError("config key 'coverage.kind': expected \"uniform\" or \"heavy_on_arm\"");
    }
    if (!j.contains("arm") || !j.contains("fraction")) {
        throw ConfigError("config key 'coverage': heavy_on_arm needs 'arm' and 'fraction'");
    }
    const std::uint64_t arm = get_count(j["arm"], "coverage.arm");
    if (arm == 0) throw ConfigError("config key 'coverage.arm': arms are numbered from 1");
    const double fraction = get_real(j["fraction"], "coverage.fraction");
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw ConfigError("config key 'coverage.fraction': must lie in (0, 1]");
    }
    return CoveragePattern::heavy_on_arm(static_cast<std::size_t>(arm - 1), fraction);
}

}  // namespace detail

inline ConfigFile parse_config(const Json& doc) {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    detail::reject_unknown(doc,
                           {"K", "mu_on", "optimal_mean", "suboptimal_mean", "mu_off", "delta",
                            "suboptimal_off_mean", "v_bounds", "reward_family", "coverage",
                            "offline_total", "policies", "radius_scale", "horizon", "runs", "seed",
                            "stride", "redraw_offline_per_run"},
                           "");
    ConfigFile c;
    if (doc.contains("K")) c.num_arms = detail::get_count(doc["K"], "K");
    if (doc.contains("mu_on")) c.mu_on = detail::get_real_list(doc["mu_on"], "mu_on");
    if (doc.contains("optimal_mean")) c.optimal_mean = detail::get_real(doc["optimal_mean"], "optimal_mean");
    if (doc.contains("suboptimal_mean")) {
        c.suboptimal_mean = detail::get_real(doc["suboptimal_mean"], "suboptimal_mean");
    }
    if (doc.contains("mu_off")) c.mu_off = detail::get_real_list(doc["mu_off"], "mu_off");
    if (doc.contains("delta")) c.delta = detail::get_real(doc["delta"], "delta");
    if (doc.contains("suboptimal_off_mean")) {
        c.suboptimal_off_mean = detail::get_real(doc["suboptimal_off_mean"], "suboptimal_off_mean");
    }
    if (doc.contains("v_bounds")) c.v_bounds = detail::parse_v_rule(doc["v_bounds"]);
    if (doc.contains("reward_family")) c.reward_family = detail::parse_family(doc["reward_family"]);
    if (doc.contains("coverage")) c.coverage = detail::parse_coverage(doc["coverage"]);
    if (doc.contains("offline_total")) c.offline_total = detail::get_count(doc["offline_total"], "offline_total");
    if (doc.contains("policies")) {
        const auto& p = doc["policies"];
        if (!p.is_array() || p.empty()) {
            throw ConfigError("config key 'policies': expected a non-empty list of names");
        }
        c.policies.clear();
        for (const auto& name : p) {
            const auto kind = name.is_string() ? parse_policy(name.get<std::string>()) : std::nullopt;
            if (!kind) {
                throw ConfigError("config key 'policies': unknown policy " + name.dump() +
                                  " (valid: anchor_ts, anchor_ts_online, ts, ucb1, hybrid_ts, "
                                  "hybrid_ucb, min_ucb)");
            }
            if (std::find(c.policies.begin(), c.policies.end(), *kind) != c.policies.end()) {
                throw ConfigError("config key 'policies': duplicate policy " + name.dump());
            }
            c.policies.push_back(*kind);
        }
    }
    if (doc.contains("radius_scale")) {
        c.radius_scale = detail::get_real(doc["radius_scale"], "radius_scale");
        if (!(c.radius_scale > 0.0)) throw ConfigError("config key 'radius_scale': must be > 0");
    }
    if (doc.contains("horizon")) c.horizon = detail::get_count(doc["horizon"], "horizon");
    if (doc.contains("runs")) c.runs = detail::get_count(doc["runs"], "runs");
    if (doc.contains("seed")) c.seed = detail::get_count(doc["seed"], "seed");
    if (doc.contains("stride")) c.stride = detail::get_count(doc["stride"], "stride");
    if (doc.contains("redraw_offline_per_run")) {
        if (!doc["redraw_offline_per_run"].is_boolean()) {
            throw ConfigError("config key 'redraw_offline_per_run': expected true or false");
        }
        c.redraw_offline_per_run = doc["redraw_offline_per_run"].get<bool>();
    }

    if (c.horizon == 0) throw ConfigError("config key 'horizon': must be >= 1");
    if (c.runs == 0) throw ConfigError("config key 'runs': must be >= 1");
    if (c.stride == 0) throw ConfigError("config key 'stride': must be >= 1");
    if (c.mu_on && (c.optimal_mean || c.suboptimal_mean)) {
        throw ConfigError("config key 'mu_on': give either a list or optimal_mean/suboptimal_mean, not both");
    }
    if (c.mu_off && (c.delta || c.suboptimal_off_mean)) {
        throw ConfigError("config key 'mu_off': give either a list or delta/suboptimal_off_mean, not both");
    }
    return c;
}

inline ConfigFile load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config file '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return parse_config(doc);
}

struct ResolvedMeans {
    std::vector<double> mu_on;
    std::vector<double> mu_off;
};

inline ResolvedMeans resolve_means(const ConfigFile& c) {
    ResolvedMeans m;
    if (c.mu_on) {
        m.mu_on = *c.mu_on;
        if (c.num_arms && *c.num_arms != m.mu_on.size()) {
            throw ConfigError("config key 'mu_on': length " + std::to_string(m.mu_on.size()) +
                              " does not match K = " + std::to_string(*c.num_arms));
        }
    } else {
        if (!c.num_arms) throw ConfigError("config key 'K': required when mu_on is not a list");
        if (!c.optimal_mean || !c.suboptimal_mean) {
            throw ConfigError("config key 'mu_on': give a list or both optimal_mean and suboptimal_mean");
        }
        m.mu_on.assign(*c.num_arms, *c.suboptimal_mean);
        if (!m.mu_on.empty()) m.mu_on[0] = *c.optimal_mean;
    }
    if (m.mu_on.empty()) throw ConfigError("config key 'K': must be >= 1");

    if (c.mu_off) {
        m.mu_off = *c.mu_off;
        if (m.mu_off.size() != m.mu_on.size()) {
            throw ConfigError("config key 'mu_off': length does not match the number of arms");
        }
    } else {
        m.mu_off = m.mu_on;
        std::size_t best = 0;
        for (std::size_t i = 1; i < m.mu_on.size(); ++i) {
            if (m.mu_on[i] > m.mu_on[best]) best = i;
        }
        for (std::size_t i = 0; i < m.mu_on.size(); ++i) {
            if (i == best) {
                if (c.delta) m.mu_off[i] = m.mu_on[i] - *c.delta;
            } else if (c.suboptimal_off_mean) {
                m.mu_off[i] = *c.suboptimal_off_mean;
            }
        }
    }
    return m;
}

inline std::vector<double> resolve_v_bounds(const VBoundRule& rule, const ResolvedMeans& m) {
    const std::size_t k = m.mu_on.size();
    std::vector<double> v(k);
    for (std::size_t i = 0; i < k; ++i) {
        const double bias = std::abs(m.mu_off[i] - m.mu_on[i]);
        switch (rule.mode) {
            case VBoundRule::Mode::List:
                if (rule.list.size() != k) {
                    throw ConfigError("config key 'v_bounds': length does not match the number of arms");
                }
                v[i] = rule.list[i];
                break;
            case VBoundRule::Mode::Fixed: v[i] = rule.value; break;
            case VBoundRule::Mode::TrueBias: v[i] = bias; break;
            case VBoundRule::Mode::MaxOfTrueAnd: v[i] = std::max(bias, rule.value); break;
        }
    }
    return v;
}

inline ExperimentConfig resolve(const ConfigFile& c) {
    const ResolvedMeans m = resolve_means(c);
    const std::vector<double> v = resolve_v_bounds(c.v_bounds, m);
    std::vector<ArmSpec> arms;
    for (std::size_t i = 0; i < m.mu_on.size(); ++i) arms.push_back({m.mu_on[i], m.mu_off[i], v[i]});

    if (c.coverage.kind == CoveragePattern::Kind::HeavyOnArm) {
        if (c.coverage.arm >= arms.size()) {
            throw ConfigError("config key 'coverage.arm': arm " + std::to_string(c.coverage.arm + 1) +
                              " exceeds K = " + std::to_string(arms.size()));
        }
        if (arms.size() == 1 && c.coverage.fraction < 1.0) {
            throw ConfigError("config key 'coverage.fraction': must be 1 when K = 1");
        }
    }
    try {
        BanditInstance instance(std::move(arms), c.reward_family);
        ExperimentConfig e{.instance = std::move(instance)};
        e.coverage = c.coverage;
        e.offline_total = c.offline_total;
        for (auto k : c.policies) e.policies.push_back({k, c.radius_scale});
        e.horizon = c.horizon;
        e.replications = c.runs;
        e.master_seed = Seed{c.seed};
        e.checkpoint_stride = c.stride;
        e.redraw_offline_per_run = c.redraw_offline_per_run;
        return e;
    } catch (const std::invalid_argument& ex) {
        throw ConfigError(std::string("invalid instance: ") + ex.what());
    }
}

/// List-form document that parse_config accepts and resolves to `e`.
inline Json resolved_config_json(const ExperimentConfig& e) {
    Json j;
    const auto& arms = e.instance.arms();
    j["K"] = arms.size();
    Json on = Json::array(), off = Json::array(), v = Json::array();
    for (const auto& a : arms) {
        on.push_back(a.mu_on);
        off.push_back(a.mu_off);
        v.push_back(a.v_bound);
    }
    j["mu_on"] = on;
    j["mu_off"] = off;
    j["v_bounds"] = v;
    if (e.instance.family().kind == RewardKind::Gaussian) {
        j["reward_family"] = {{"kind", "gaussian"}, {"sigma", e.instance.family().sigma}};
    } else {
        j["reward_family"] = {{"kind", "bernoulli"}};
    }
    if (e.coverage.kind == CoveragePattern::Kind::Uniform) {
        j["coverage"] = {{"kind", "uniform"}};
    } else {
        j["coverage"] = {{"kind", "heavy_on_arm"}, {"arm", e.coverage.arm + 1}, {"fraction", e.coverage.fraction}};
    }
    j["offline_total"] = e.offline_total;
    Json pols = Json::array();
    for (const auto& p : e.policies) pols.push_back(std::string(policy_name(p.kind)));
    j["policies"] = pols;
    j["radius_scale"] = e.policies.empty() ? 2.0 : e.policies.front().radius_scale;
    j["horizon"] = e.horizon;
    j["runs"] = e.replications;
    j["seed"] = e.master_seed.value;
    j["stride"] = e.checkpoint_stride;
    j["redraw_offline_per_run"] = e.redraw_offline_per_run;
    return j;
}

// --- sweeps -----------------------------------------------------------------

enum class SweepParam { OfflineTotal, Delta, V, K };

inline std::optional<SweepParam> parse_sweep_param(std::string_view s) {
    if (s == "offline_total") return SweepParam::OfflineTotal;
    if (s == "delta") return SweepParam::Delta;
    if (s == "v") return SweepParam::V;
    if (s == "K") return SweepParam::K;
    return std::nullopt;
}

inline std::string_view sweep_param_name(SweepParam p) {
    switch (p) {
        case SweepParam::OfflineTotal: return "offline_total";
        case SweepParam::Delta: return "delta";
        case SweepParam::V: return "v";
        case SweepParam::K: return "K";
    }
    return "unknown";
}

/// Config for one sweep point.
///   offline_total, K  set directly (integers)
///   delta             mu_off[optimal] = mu_on[optimal] - delta
///   v                 V_i = max(|mu_off_i - mu_on_i|, value)
inline ConfigFile apply_sweep_value(ConfigFile c, SweepParam param, double value) {
    auto as_count = [&](const char* what) {
        if (!(value >= 0.0) || value != std::floor(value)) {
            throw ConfigError(std::string("sweep value for '") + what + "' must be a non-negative integer");
        }
        return static_cast<std::uint64_t>(value);
    };
    switch (param) {
        case SweepParam::OfflineTotal:
            c.offline_total = as_count("offline_total");
            break;
        case SweepParam::Delta: {
            ResolvedMeans m = resolve_means(c);
            std::size_t best = 0;
            for (std::size_t i = 1; i < m.mu_on.size(); ++i) {
                if (m.mu_on[i] > m.mu_on[best]) best = i;
            }
            m.mu_off[best] = m.mu_on[best] - value;
            c.mu_on = m.mu_on;
            c.mu_off = m.mu_off;
            c.optimal_mean.reset();
            c.suboptimal_mean.reset();
            c.delta.reset();
            c.suboptimal_off_mean.reset();
            c.num_arms = m.mu_on.size();
            break;
        }
        case SweepParam::V:
            if (value < 0.0) throw ConfigError("sweep value for 'v' must be >= 0");
            c.v_bounds = VBoundRule{VBoundRule::Mode::MaxOfTrueAnd, value, {}};
            break;
        case SweepParam::K: {
            const std::uint64_t k = as_count("K");
            if (k == 0) throw ConfigError("sweep value for 'K' must be >= 1");
            if (c.mu_on || c.mu_off) {
                throw ConfigError("sweeping 'K' needs the optimal_mean/suboptimal_mean form, not mu_on/mu_off lists");
            }
            if (c.v_bounds.mode == VBoundRule::Mode::List) {
                throw ConfigError("sweeping 'K' needs a scalar v_bounds rule, not a list");
            }
            c.num_arms = k;
            break;
        }
    }
    return c;
}

}  // namespace anchor_bandits
