// simulator.hpp
//
// Policy/environment episodes, pseudo-regret accounting and seeded
// replications.
//
// Stream layout for replication r:
//   offline data        [("offline", r)]        (r = 0 for every run when the
//                                                dataset is not redrawn)
//   policy p, arm i     [("policy", fnv1a64(name(p))), ("run", r), ("arm", i)]
//   policy p, rewards   [("policy", fnv1a64(name(p))), ("run", r), ("reward", 0)]
//
// Streams are keyed by policy name, so reordering the policy list does not
// change any policy's results. Within a replication every policy sees the
// same offline dataset.
#pragma once

#include "environment.hpp"
#include "policies.hpp"
#include "rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace anchor_bandits {

template <class P>
concept BanditPolicy = requires(P policy, std::span<RngStream> streams, std::size_t arm, double r) {
    { policy.select(streams) } -> std::convertible_to<std::size_t>;
    policy.update(arm, r);
};

struct ExperimentConfig {
    BanditInstance instance;
    CoveragePattern coverage{};
    std::uint64_t offline_total{0};
    std::vector<PolicySpec> policies{};
    std::uint64_t horizon{10000};
    std::uint64_t replications{50};
    Seed master_seed{};
    std::uint64_t checkpoint_stride{10};
    bool redraw_offline_per_run{true};
};

struct Checkpoint {
    std::uint64_t round{0};
    double cum_regret{0.0};
};

struct RunResult {
    PolicyKind policy{PolicyKind::AnchorTS};
    std::uint64_t run_index{0};
    std::vector<Checkpoint> checkpoints;
    std::vector<std::uint64_t> pull_counts;
    std::vector<std::string> warnings;
    std::vector<std::uint32_t> arm_sequence;  // filled only when requested

    double final_regret() const { return checkpoints.empty() ? 0.0 : checkpoints.back().cum_regret; }
};

struct EpisodeStreams {
    std::vector<RngStream> arms;
    RngStream reward;

    static EpisodeStreams for_policy(Seed master, PolicyKind kind, std::uint64_t run,
                                     std::size_t num_arms) {
        const RngStream base = derive_stream(
            master, {{"policy", fnv1a64(policy_name(kind))}, {"run", run}});
        std::vector<RngStream> arms;
        arms.reserve(num_arms);
        for (std::size_t i = 0; i < num_arms; ++i) arms.push_back(base.child("arm", i));
        return {std::move(arms), base.child("reward", 0)};
    }
};

struct EpisodeOptions {
    std::uint64_t checkpoint_stride{10};
    bool record_arms{false};
};

/// Runs `horizon` rounds of select -> reward -> update and records
/// cumulative pseudo-regret every `checkpoint_stride` rounds and at the end.
template <BanditPolicy Policy>
RunResult run_episode(Policy& policy, const BanditInstance& instance, std::uint64_t horizon,
                      EpisodeStreams& streams, const EpisodeOptions& options = {}) {
    if (horizon == 0) throw std::invalid_argument("run_episode: horizon must be >= 1");
    if (options.checkpoint_stride == 0) {
        throw std::invalid_argument("run_episode: checkpoint_stride must be >= 1");
    }
    const std::size_t k = instance.num_arms();
    if (streams.arms.size() != k) throw std::invalid_argument("run_episode: need one stream per arm");

    const GapInfo gaps = suboptimality_gaps(instance);
    RunResult result;
    result.pull_counts.assign(k, 0);
    result.warnings = instance.bias_warnings();
    result.checkpoints.reserve(horizon / options.checkpoint_stride + 1);
    if (options.record_arms) result.arm_sequence.reserve(horizon);

    double cum = 0.0;
    for (std::uint64_t t = 1; t <= horizon; ++t) {
        const std::size_t arm = policy.select(std::span<RngStream>(streams.arms));
        if (arm >= k) throw std::logic_error("policy selected an out-of-range arm");
        const double reward = sample_reward(instance, arm, streams.reward);
        policy.update(arm, reward);
        cum += gaps.gaps[arm];
        ++result.pull_counts[arm];
        if (options.record_arms) result.arm_sequence.push_back(static_cast<std::uint32_t>(arm));
        if (t % options.checkpoint_stride == 0 || t == horizon) {
            result.checkpoints.push_back({t, cum});
        }
    }
    return result;
}

inline RunResult run_single(const PolicySpec& spec, const BanditInstance& instance,
                            const OfflineDataset& offline, std::uint64_t horizon,
                            EpisodeStreams& streams, const EpisodeOptions& options = {}) {
    const auto v = instance.v_bounds();
    PolicyState state = init_policy(spec, instance.num_arms(), offline, v);
    RunResult r = run_episode(state, instance, horizon, streams, options);
    r.policy = spec.kind;
    return r;
}

/// True iff the final cumulative regret equals sum_i gap_i * pulls_i (1e-9).
inline bool regret_identity_check(const RunResult& result, const BanditInstance& instance) {
    if (result.pull_counts.size() != instance.num_arms()) return false;
    const GapInfo gaps = suboptimality_gaps(instance);
    double expected = 0.0;
    for (std::size_t i = 0; i < gaps.gaps.size(); ++i) {
        expected += gaps.gaps[i] * static_cast<double>(result.pull_counts[i]);
    }
    return std::abs(result.final_regret() - expected) <= 1e-9;
}

struct AggregatePoint {
    std::uint64_t round{0};
    double mean{0.0};
    double std_error{0.0};
};

struct AggregateResult {
    PolicyKind policy{PolicyKind::AnchorTS};
    std::size_t runs{0};  // effective number of completed runs
    std::vector<AggregatePoint> points;

    const AggregatePoint& final_point() const {
        if (points.empty()) throw std::logic_error("aggregate has no checkpoints");
        return points.back();
    }
};

/// Mean and standard error (sample sd / sqrt(R), 0 when R = 1) per checkpoint.
/// Runs are reduced in ascending run_index order regardless of input order.
inline AggregateResult aggregate_runs(PolicyKind policy, std::vector<const RunResult*> runs) {
    AggregateResult agg;
    agg.policy = policy;
    agg.runs = runs.size();
    if (runs.empty()) return agg;
    std::sort(runs.begin(), runs.end(),
              [](const RunResult* a, const RunResult* b) { return a->run_index < b->run_index; });
    const std::size_t npts = runs.front()->checkpoints.size();
    for (const auto* r : runs) {
        if (r->checkpoints.size() != npts) {
            throw std::invalid_argument("aggregate_runs: runs have different checkpoint grids");
        }
    }
    const double n = static_cast<double>(runs.size());
    agg.points.resize(npts);
    for (std::size_t j = 0; j < npts; ++j) {
        double sum = 0.0;
        for (const auto* r : runs) sum += r->checkpoints[j].cum_regret;
        const double mean = sum / n;
        double ss = 0.0;
        for (const auto* r : runs) {
            const double d = r->checkpoints[j].cum_regret - mean;
            ss += d * d;
        }
        const double se = runs.size() > 1 ? std::sqrt(ss / (n - 1.0)) / std::sqrt(n) : 0.0;
        agg.points[j] = {runs.front()->checkpoints[j].round, mean, se};
    }
    return agg;
}

inline AggregateResult aggregate_runs(PolicyKind policy, std::span<const RunResult> runs) {
    std::vector<const RunResult*> ptrs;
    ptrs.reserve(runs.size());
    for (const auto& r : runs) ptrs.push_back(&r);
    return aggregate_runs(policy, std::move(ptrs));
}

struct RunFailure {
    PolicyKind policy{PolicyKind::AnchorTS};
    std::uint64_t run_index{0};
    std::string message;
};

struct ExperimentResult {
    std::vector<AggregateResult> aggregates;  // config policy order
    std::vector<RunResult> runs;              // policy-major, then run index
    std::vector<RunFailure> failures;
    std::vector<std::uint64_t> offline_counts;
};

inline OfflineDataset offline_for_run(const ExperimentConfig& config,
                                      const std::vector<std::uint64_t>& counts, std::uint64_t run) {
    const std::uint64_t key = config.redraw_offline_per_run ? run : 0;
    RngStream stream = derive_stream(config.master_seed, {{"offline", key}});
    return generate_offline_dataset(config.instance, counts, stream);
}

/// Worker count from a requested value; 0 means all hardware threads.
inline unsigned resolve_threads(unsigned requested) {
    if (requested != 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

/// Runs every (policy, replication) episode on up to `threads` workers.
/// The result does not depend on the worker count or scheduling order.
inline ExperimentResult run_experiment(const ExperimentConfig& config, unsigned threads = 1) {
    if (config.horizon == 0) throw std::invalid_argument("horizon must be >= 1");
    if (config.replications == 0) throw std::invalid_argument("replications must be >= 1");
    if (config.checkpoint_stride == 0) throw std::invalid_argument("checkpoint_stride must be >= 1");
    if (config.policies.empty()) throw std::invalid_argument("at least one policy is required");

    ExperimentResult out;
    const std::size_t k = config.instance.num_arms();
    out.offline_counts = allocate_offline_counts(config.offline_total, k, config.coverage);

    const std::uint64_t reps = config.replications;
    std::vector<OfflineDataset> datasets;
    datasets.reserve(reps);
    for (std::uint64_t r = 0; r < reps; ++r) {
        if (!config.redraw_offline_per_run && r > 0) {
            datasets.push_back(datasets.front());
        } else {
            datasets.push_back(offline_for_run(config, out.offline_counts, r));
        }
    }

    const std::size_t np = config.policies.size();
    const std::size_t ntasks = np * reps;
    std::vector<RunResult> slots(ntasks);
    std::vector<std::string> errors(ntasks);
    std::vector<char> ok(ntasks, 0);
    const EpisodeOptions options{config.checkpoint_stride, false};

    auto execute = [&](std::size_t task) {
        const std::size_t p = task / reps;
        const std::uint64_t r = task % reps;
        const PolicySpec& spec = config.policies[p];
        try {
            EpisodeStreams streams = EpisodeStreams::for_policy(config.master_seed, spec.kind, r, k);
            RunResult res = run_single(spec, config.instance, datasets[r], config.horizon, streams, options);
            res.run_index = r;
            slots[task] = std::move(res);
            ok[task] = 1;
        } catch (const std::exception& e) {
            errors[task] = e.what();
        }
    };

    const unsigned workers = std::min<std::size_t>(resolve_threads(threads), ntasks);
    if (workers <= 1) {
        for (std::size_t task = 0; task < ntasks; ++task) execute(task);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t task = next.fetch_add(1); task < ntasks; task = next.fetch_add(1)) {
                    execute(task);
                }
            });
        }
    }

    for (std::size_t p = 0; p < np; ++p) {
        std::vector<const RunResult*> done;
        for (std::uint64_t r = 0; r < reps; ++r) {
            const std::size_t task = p * reps + r;
            if (ok[task]) {
                done.push_back(&slots[task]);
            } else {
                out.failures.push_back({config.policies[p].kind, r, errors[task]});
            }
        }
        out.aggregates.push_back(aggregate_runs(config.policies[p].kind, std::move(done)));
    }
    for (std::size_t task = 0; task < ntasks; ++task) {
        if (ok[task]) out.runs.push_back(std::move(slots[task]));
    }
    return out;
}

}  // namespace anchor_bandits
