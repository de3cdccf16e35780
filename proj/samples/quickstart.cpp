// Minimal library usage: build an instance with biased offline data, run a
// few policies and print their final mean regret.

#include <anchor_bandits/anchor_bandits.hpp>

#include <cstdio>
#include <string>

int main() {
    using namespace anchor_bandits;

    // Arm 1 is optimal online (0.8) but looks worse offline (0.5); the other
    // nine arms look better offline (0.6) than they are online (0.5).
    std::vector<ArmSpec> arms{{0.8, 0.5, 0.3}};
    for (int i = 0; i < 9; ++i) arms.push_back({0.5, 0.6, 0.1});

    ExperimentConfig config{.instance = BanditInstance(arms, RewardFamily::gaussian(1.0))};
    config.offline_total = 2000;
    config.coverage = CoveragePattern::uniform();
    config.horizon = 5000;
    config.replications = 20;
    config.master_seed = Seed{7};
    config.checkpoint_stride = 100;
    config.policies = {{PolicyKind::AnchorTS}, {PolicyKind::VanillaTS}, {PolicyKind::MinUCB}};

    const ExperimentResult result = run_experiment(config, 0);
    for (const auto& agg : result.aggregates) {
        const auto& last = agg.final_point();
        std::printf("%-10s regret(T=%llu) = %8.2f +- %.2f\n", std::string(policy_name(agg.policy)).c_str(),
                    static_cast<unsigned long long>(last.round), last.mean, last.std_error);
    }
    return 0;
}
