#include <anchor_bandits/commands.hpp>

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace ab = anchor_bandits;
namespace fs = std::filesystem;

namespace {

const fs::path kSource{ANCHOR_BANDITS_SOURCE_DIR};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class TempDir {
public:
    TempDir() {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        path_ = fs::temp_directory_path() /
                (std::string("anchor_bandits_") + info->test_suite_name() + "_" + info->name());
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

ab::Json small_doc() { return ab::Json::parse(slurp(kSource / "tests/data/small.json")); }

fs::path write_json(const fs::path& dir, const std::string& name, const ab::Json& j) {
    const fs::path p = dir / name;
    ab::write_text_file(p, j.dump(2));
    return p;
}

std::string parse_error(const std::string& text) {
    try {
        (void)ab::resolve(ab::parse_config(ab::Json::parse(text)));
    } catch (const ab::ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Config, RejectsUnknownKeyByName) {
    const auto msg = parse_error(R"({"K": 2, "optimal_mean": 0.8, "suboptimal_mean": 0.5, "horizn": 10})");
    EXPECT_NE(msg.find("unknown config key 'horizn'"), std::string::npos) << msg;
}

TEST(Config, TypeErrorsNameTheKey) {
    EXPECT_NE(parse_error(R"({"K": "ten"})").find("'K'"), std::string::npos);
    EXPECT_NE(parse_error(R"({"mu_on": [0.5, "x"]})").find("mu_on[1]"), std::string::npos);
    EXPECT_NE(parse_error(R"({"mu_on": [0.5], "horizon": -3})").find("'horizon'"), std::string::npos);
    EXPECT_NE(parse_error(R"({"mu_on": [0.5], "policies": ["nope"]})").find("'policies'"), std::string::npos);
    EXPECT_NE(parse_error(R"({"mu_on": [0.5], "runs": 0})").find("'runs'"), std::string::npos);
    EXPECT_NE(parse_error(R"({"mu_on": [0.5, 0.2], "mu_off": [0.5]})").find("'mu_off'"), std::string::npos);
    EXPECT_NE(parse_error(R"({"mu_on": [0.5, 0.2], "coverage": {"kind": "heavy_on_arm", "arm": 3, "fraction": 0.5}})")
                  .find("coverage.arm"),
              std::string::npos);
    EXPECT_NE(parse_error("[1, 2]").find("object"), std::string::npos);
}

TEST(Config, InvalidInstanceIsAConfigError) {
    EXPECT_NE(parse_error(R"({"mu_on": [0.5, 1.5], "reward_family": {"kind": "bernoulli"}})").find("invalid instance"),
              std::string::npos);
}

TEST(Config, GeneratorFormResolves) {
    const auto cfg = ab::resolve(ab::load_config(kSource / "configs/biased_uniform.json"));
    ASSERT_EQ(cfg.instance.num_arms(), 10u);
    EXPECT_DOUBLE_EQ(cfg.instance.arm(0).mu_on, 0.8);
    EXPECT_NEAR(cfg.instance.arm(0).mu_off, 0.5, 1e-15);
    EXPECT_NEAR(cfg.instance.arm(0).v_bound, 0.3, 1e-15);
    for (std::size_t i = 1; i < 10; ++i) {
        EXPECT_DOUBLE_EQ(cfg.instance.arm(i).mu_on, 0.5);
        EXPECT_DOUBLE_EQ(cfg.instance.arm(i).mu_off, 0.6);
        EXPECT_NEAR(cfg.instance.arm(i).v_bound, 0.1, 1e-15);
    }
    EXPECT_EQ(cfg.policies.size(), ab::kAllPolicies.size());
    EXPECT_EQ(cfg.horizon, 10000u);
    EXPECT_EQ(cfg.replications, 50u);
    EXPECT_EQ(cfg.checkpoint_stride, 10u);
}

TEST(Config, ShippedConfigsResolve) {
    for (const auto& entry : fs::directory_iterator(kSource / "configs")) {
        EXPECT_NO_THROW((void)ab::resolve(ab::load_config(entry.path()))) << entry.path();
    }
}

TEST(Config, LoadErrors) {
    TempDir tmp;
    EXPECT_THROW(ab::load_config(tmp.path() / "missing.json"), ab::ConfigError);
    ab::write_text_file(tmp.path() / "bad.json", "{ not json");
    EXPECT_THROW(ab::load_config(tmp.path() / "bad.json"), ab::ConfigError);
}

TEST(Sweep, DeltaRewritesOptimalOfflineMean) {
    auto base = ab::parse_config(small_doc());
    base.delta.reset();
    const auto derived = ab::resolve(ab::apply_sweep_value(base, ab::SweepParam::Delta, 0.3));
    EXPECT_NEAR(derived.instance.arm(0).mu_off, 0.5, 1e-15);
    for (std::size_t i = 1; i < 4; ++i) EXPECT_DOUBLE_EQ(derived.instance.arm(i).mu_off, 0.6);
}

TEST(Sweep, VIsFlooredByTrueBias) {
    const auto base = ab::parse_config(small_doc());
    const auto zero = ab::resolve(ab::apply_sweep_value(base, ab::SweepParam::V, 0.0));
    EXPECT_NEAR(zero.instance.arm(0).v_bound, 0.3, 1e-15);
    EXPECT_NEAR(zero.instance.arm(1).v_bound, 0.1, 1e-15);
    const auto big = ab::resolve(ab::apply_sweep_value(base, ab::SweepParam::V, 1.0));
    for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(big.instance.arm(i).v_bound, 1.0);
}

TEST(Sweep, InvalidValues) {
    const auto base = ab::parse_config(small_doc());
    EXPECT_THROW(ab::apply_sweep_value(base, ab::SweepParam::OfflineTotal, 1.5), ab::ConfigError);
    EXPECT_THROW(ab::apply_sweep_value(base, ab::SweepParam::K, 0.0), ab::ConfigError);
    EXPECT_THROW(ab::apply_sweep_value(base, ab::SweepParam::V, -0.1), ab::ConfigError);
    EXPECT_FALSE(ab::parse_sweep_param("sigma").has_value());
}

TEST(Sweep, SplitValues) {
    const std::vector<std::string> want{"0", "0.1", "0.3"};
    EXPECT_EQ(ab::split_values({"[0, 0.1,0.3]"}), want);
    EXPECT_EQ(ab::split_values({"0,0.1,0.3"}), want);
    EXPECT_EQ(ab::split_values({"0", "0.1", "0.3"}), want);
}

TEST(Commands, RunWritesBundleAndIsReproducible) {
    TempDir tmp;
    std::ostringstream log;
    ab::RunOptions o;
    o.config = kSource / "tests/data/small.json";
    o.out_dir = tmp.path() / "a";
    o.threads = 1;
    ASSERT_EQ(ab::cmd_run(o, log), ab::kExitOk) << log.str();
    o.out_dir = tmp.path() / "b";
    ASSERT_EQ(ab::cmd_run(o, log), ab::kExitOk) << log.str();
    for (const char* f : {"curves.csv", "summary.csv", "meta.json"}) {
        EXPECT_EQ(slurp(tmp.path() / "a" / f), slurp(tmp.path() / "b" / f)) << f;
    }

    const auto meta = ab::Json::parse(slurp(tmp.path() / "a/meta.json"));
    EXPECT_EQ(meta["master_seed"], 11);
    EXPECT_EQ(meta["optimal_arm"], 1);
    ASSERT_EQ(meta["arms"].size(), 4u);
    for (const auto& a : meta["arms"]) EXPECT_EQ(a["n_off"], 10);
    EXPECT_EQ(meta["runs_completed"]["anchor_ts"], 3);
    EXPECT_TRUE(meta["failures"].empty());

    const auto curves = slurp(tmp.path() / "a/curves.csv");
    EXPECT_EQ(curves.rfind("algorithm,run,round,cum_regret\n", 0), 0u);
    // 7 policies x 3 runs x rounds {50, 100, 150, 200}
    EXPECT_EQ(std::count(curves.begin(), curves.end(), '\n'), 1 + 7 * 3 * 4);
}

TEST(Commands, GoldenSmallCurves) {
    TempDir tmp;
    std::ostringstream log;
    ab::RunOptions o;
    o.config = kSource / "tests/data/small.json";
    o.out_dir = tmp.path();
    ASSERT_EQ(ab::cmd_run(o, log), ab::kExitOk);
    EXPECT_EQ(slurp(tmp.path() / "curves.csv"), slurp(kSource / "tests/data/small_curves.csv"));
}

TEST(Commands, OffsetsApply) {
    TempDir tmp;
    std::ostringstream log;
    ab::RunOptions o;
    o.config = kSource / "tests/data/small.json";
    o.out_dir = tmp.path();
    o.runs = 1;
    o.horizon = 120;
    o.seed = 5;
    ASSERT_EQ(ab::cmd_run(o, log), ab::kExitOk);
    const auto summary = slurp(tmp.path() / "summary.csv");
    std::istringstream in(summary);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "algorithm,round,mean_regret,stderr");
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        EXPECT_EQ(line.substr(line.rfind(',') + 1), "0") << line;
    }
    EXPECT_EQ(rows, 7 * 3);  // rounds 50, 100, 120
    const auto meta = ab::Json::parse(slurp(tmp.path() / "meta.json"));
    EXPECT_EQ(meta["master_seed"], 5);
    EXPECT_EQ(meta["config"]["horizon"], 120);

    o.runs = 0;
    EXPECT_EQ(ab::cmd_run(o, log), ab::kExitConfig);
}

TEST(Commands, ResolvedConfigReproducesRun) {
    TempDir tmp;
    std::ostringstream log;
    ab::RunOptions o;
    o.config = kSource / "tests/data/small.json";
    o.out_dir = tmp.path() / "first";
    ASSERT_EQ(ab::cmd_run(o, log), ab::kExitOk);
    const auto meta = ab::Json::parse(slurp(tmp.path() / "first/meta.json"));
    o.config = write_json(tmp.path(), "resolved.json", meta["config"]);
    o.out_dir = tmp.path() / "second";
    ASSERT_EQ(ab::cmd_run(o, log), ab::kExitOk) << log.str();
    EXPECT_EQ(slurp(tmp.path() / "first/curves.csv"), slurp(tmp.path() / "second/curves.csv"));
}

TEST(Commands, SingleArmHasZeroRegret) {
    TempDir tmp;
    auto doc = small_doc();
    doc["K"] = 1;
    std::ostringstream log;
    ab::RunOptions o;
    o.config = write_json(tmp.path(), "k1.json", doc);
    o.out_dir = tmp.path() / "out";
    ASSERT_EQ(ab::cmd_run(o, log), ab::kExitOk) << log.str();
    std::istringstream in(slurp(tmp.path() / "out/curves.csv"));
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) EXPECT_EQ(line.substr(line.rfind(',') + 1), "0") << line;
}

TEST(Commands, BiasWarningsAreLogged) {
    TempDir tmp;
    auto doc = small_doc();
    doc["v_bounds"] = 0.05;
    std::ostringstream log;
    ab::RunOptions o;
    o.config = write_json(tmp.path(), "tight.json", doc);
    o.out_dir = tmp.path() / "out";
    ASSERT_EQ(ab::cmd_run(o, log), ab::kExitOk);
    EXPECT_NE(log.str().find("warning: arm 1"), std::string::npos) << log.str();
    const auto meta = ab::Json::parse(slurp(tmp.path() / "out/meta.json"));
    EXPECT_EQ(meta["arms"][0]["bias_within_bound"], false);
    EXPECT_EQ(meta["warnings"].size(), 4u);
}

TEST(Commands, SweepWritesOneBundlePerValue) {
    TempDir tmp;
    std::ostringstream log;
    ab::SweepOptions o;
    o.config = kSource / "tests/data/small.json";
    o.param = "v";
    o.values = {"[0.0, 1.0]"};
    o.out_dir = tmp.path();
    ASSERT_EQ(ab::cmd_sweep(o, log), ab::kExitOk) << log.str();
    const auto index = ab::Json::parse(slurp(tmp.path() / "sweep_index.json"));
    EXPECT_EQ(index["param"], "v");
    ASSERT_EQ(index["entries"].size(), 2u);
    for (const auto& e : index["entries"]) {
        EXPECT_TRUE(fs::exists(tmp.path() / e["dir"].get<std::string>() / "curves.csv"));
    }
    const auto meta0 = ab::Json::parse(slurp(tmp.path() / index["entries"][0]["dir"].get<std::string>() / "meta.json"));
    EXPECT_NEAR(meta0["arms"][0]["v_bound"].get<double>(), 0.3, 1e-15);
}

TEST(Commands, SweepRejectsBadInputBeforeRunning) {
    TempDir tmp;
    std::ostringstream log;
    ab::SweepOptions o;
    o.config = kSource / "tests/data/small.json";
    o.param = "sigma";
    o.values = {"1"};
    o.out_dir = tmp.path() / "out";
    EXPECT_EQ(ab::cmd_sweep(o, log), ab::kExitConfig);
    EXPECT_NE(log.str().find("valid:"), std::string::npos);
    o.param = "offline_total";
    o.values = {"10,abc"};
    EXPECT_EQ(ab::cmd_sweep(o, log), ab::kExitConfig);
    EXPECT_FALSE(fs::exists(o.out_dir / "offline_total_10"));
}

TEST(Commands, BoundReportsPerArmTerms) {
    TempDir tmp;
    std::ostringstream out, log;
    ab::BoundOptions o;
    o.config = kSource / "configs/biased_uniform.json";
    o.out_dir = tmp.path();
    ASSERT_EQ(ab::cmd_bound(o, out, log), ab::kExitOk) << log.str();
    const auto j = ab::Json::parse(slurp(tmp.path() / "bound.json"));
    EXPECT_EQ(j["optimal_arm"], 1);
    ASSERT_EQ(j["arms"].size(), 10u);
    // omega_1 = V + mu_off - mu_on = 0.3 + 0.5 - 0.8
    EXPECT_NEAR(j["arms"][0]["omega"].get<double>(), 0.0, 1e-15);
    EXPECT_EQ(j["arms"][0]["contribution"], 0.0);
    EXPECT_NEAR(j["arms"][1]["omega"].get<double>(), 0.2, 1e-15);
    EXPECT_EQ(j["arms"][1]["n_off"], 200);

    const auto cfg = ab::resolve(ab::load_config(o.config));
    const double direct = ab::regret_upper_bound(cfg.instance, std::vector<std::uint64_t>(10, 200), 10000);
    EXPECT_DOUBLE_EQ(j["total"].get<double>(), direct);
    EXPECT_NE(out.str().find("total "), std::string::npos);
}

TEST(Commands, BoundDuplicateOptimalArm) {
    TempDir tmp;
    ab::Json doc{{"mu_on", {0.8, 0.8, 0.5}}, {"offline_total", 30}};
    std::ostringstream out, log;
    ab::BoundOptions o;
    o.config = write_json(tmp.path(), "dup.json", doc);
    o.out_dir = tmp.path();
    ASSERT_EQ(ab::cmd_bound(o, out, log), ab::kExitOk) << log.str();
    const auto j = ab::Json::parse(slurp(tmp.path() / "bound.json"));
    EXPECT_EQ(j["arms"][0]["contribution"], 0.0);
    EXPECT_EQ(j["arms"][1]["contribution"], 0.0);
    EXPECT_GT(j["arms"][2]["contribution"].get<double>(), 0.0);
}

TEST(Commands, MissingConfigIsExitCodeTwo) {
    std::ostringstream out, log;
    ab::RunOptions r;
    r.config = "/nonexistent/config.json";
    r.out_dir = fs::temp_directory_path();
    EXPECT_EQ(ab::cmd_run(r, log), ab::kExitConfig);
    ab::BoundOptions b;
    b.config = r.config;
    EXPECT_EQ(ab::cmd_bound(b, out, log), ab::kExitConfig);
}

TEST(Commands, ThreadsFromEnvironment) {
    ::setenv("ANCHOR_BANDITS_THREADS", "3", 1);
    EXPECT_EQ(ab::threads_from_env(), 3u);
    ::setenv("ANCHOR_BANDITS_THREADS", "0", 1);
    EXPECT_EQ(ab::threads_from_env(), 0u);
    ::setenv("ANCHOR_BANDITS_THREADS", "lots", 1);
    EXPECT_EQ(ab::threads_from_env(), 0u);
    ::unsetenv("ANCHOR_BANDITS_THREADS");
    EXPECT_EQ(ab::threads_from_env(), 0u);
}
