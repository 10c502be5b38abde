#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mtgae/cli.hpp"
#include "test_support.hpp"

namespace mtgae::cli {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = test::scratch_dir(::testing::UnitTest::GetInstance()->current_test_info()->name());
    const std::size_t n = 40;
    std::ostringstream edges;
    graph::write_edge_list(edges, test::two_communities(n, 0.5, 0.05, 1));
    spit(dir_ / "edges.txt", edges.str());
    std::ostringstream labels;
    std::ostringstream features;
    for (std::size_t i = 0; i < n; ++i) {
      labels << i << ' ' << (i < n / 2 ? 0 : 1) << '\n';
      features << (i < n / 2 ? "1,0,1" : "0,1,1") << '\n';
    }
    spit(dir_ / "labels.txt", labels.str());
    spit(dir_ / "features.csv", features.str());
  }

  int cli(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return run(args, out_, err_);
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::vector<std::string> train_args(const std::string& out, std::size_t epochs = 3) const {
    return {"train",        "--edges",    path("edges.txt"), "--auto-split", "--epochs",
            std::to_string(epochs), "--hidden1", "16",         "--hidden2",    "8",
            "--out",        path(out)};
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

TEST_F(CliTest, HelpExitsZero) { EXPECT_EQ(cli({"--help"}), kSuccess); }

TEST_F(CliTest, MissingSubcommandIsUsageError) { EXPECT_EQ(cli({}), kUsage); }

TEST_F(CliTest, SplitWritesDeterministicManifest) {
  ASSERT_EQ(cli({"split", "--edges", path("edges.txt"), "--labels", path("labels.txt"),
                 "--per-class", "5", "--n-val", "5", "--n-test", "10", "--seed", "3", "--out",
                 path("a")}),
            kSuccess)
      << err_.str();
  ASSERT_EQ(cli({"split", "--edges", path("edges.txt"), "--labels", path("labels.txt"),
                 "--per-class", "5", "--n-val", "5", "--n-test", "10", "--seed", "3", "--out",
                 path("b")}),
            kSuccess);
  EXPECT_EQ(slurp(dir_ / "a/split.json"), slurp(dir_ / "b/split.json"));
  EXPECT_EQ(slurp(dir_ / "a/node_split.json"), slurp(dir_ / "b/node_split.json"));

  std::ifstream edges(dir_ / "edges.txt");
  const auto p = graph::parse_edge_list(edges).edges.size();
  const auto manifest = nlohmann::json::parse(slurp(dir_ / "a/split.json"));
  EXPECT_EQ(manifest["test_pos"].size(), static_cast<std::size_t>(0.10 * static_cast<double>(p)));
}

TEST_F(CliTest, SplitRejectsBadFraction) {
  EXPECT_EQ(cli({"split", "--edges", path("edges.txt"), "--test-frac", "1.5", "--out", path("x")}),
            kUsage);
  EXPECT_FALSE(fs::exists(dir_ / "x"));
}

TEST_F(CliTest, SplitRejectsMissingInput) {
  EXPECT_EQ(cli({"split", "--edges", path("nope.txt"), "--out", path("x")}), kUsage);
}

TEST_F(CliTest, TrainWritesArtifacts) {
  ASSERT_EQ(cli(train_args("run", 1)), kSuccess) << err_.str();
  for (const char* f : {"checkpoint.bin", "history.csv", "report.json", "split.json"}) {
    EXPECT_TRUE(fs::exists(dir_ / "run" / f)) << f;
  }
  const auto history = slurp(dir_ / "run/history.csv");
  EXPECT_EQ(std::count(history.begin(), history.end(), '\n'), 2);
  EXPECT_EQ(history.substr(0, history.find('\n')), "epoch,train_loss,val_metric");
  const auto report = nlohmann::json::parse(slurp(dir_ / "run/report.json"));
  EXPECT_EQ(report["history"].size(), 1u);
  EXPECT_EQ(report["seed"], 0);
  EXPECT_TRUE(report.contains("config"));
}

TEST_F(CliTest, TrainIsDeterministic) {
  ASSERT_EQ(cli(train_args("a")), kSuccess);
  ASSERT_EQ(cli(train_args("b")), kSuccess);
  EXPECT_EQ(slurp(dir_ / "a/checkpoint.bin"), slurp(dir_ / "b/checkpoint.bin"));
  EXPECT_EQ(slurp(dir_ / "a/report.json"), slurp(dir_ / "b/report.json"));
  EXPECT_EQ(slurp(dir_ / "a/history.csv"), slurp(dir_ / "b/history.csv"));
}

TEST_F(CliTest, MultitaskReportHasAllMetrics) {
  ASSERT_EQ(cli({"train", "--edges", path("edges.txt"), "--features", path("features.csv"),
                 "--labels", path("labels.txt"), "--mode", "multitask", "--auto-split",
                 "--per-class", "3", "--n-val", "5", "--n-test", "10", "--epochs", "3",
                 "--hidden1", "16", "--hidden2", "8", "--out", path("mt")}),
            kSuccess)
      << err_.str();
  const auto report = nlohmann::json::parse(slurp(dir_ / "mt/report.json"));
  for (const char* key : {"auc", "ap", "combined_lp", "accuracy"}) {
    ASSERT_TRUE(report[key].is_number()) << key;
    EXPECT_GE(report[key].get<double>(), 0.0);
    EXPECT_LE(report[key].get<double>(), 1.0);
  }
  EXPECT_TRUE(fs::exists(dir_ / "mt/node_split.json"));
}

TEST_F(CliTest, MultitaskWithoutLabelsIsUsageError) {
  EXPECT_EQ(cli({"train", "--edges", path("edges.txt"), "--mode", "multitask", "--auto-split",
                 "--out", path("x")}),
            kUsage);
}

TEST_F(CliTest, SeedListWritesOneRunPerSeed) {
  auto args = train_args("multi", 2);
  args.insert(args.end(), {"--seeds", "0,1"});
  ASSERT_EQ(cli(args), kSuccess) << err_.str();
  EXPECT_TRUE(fs::exists(dir_ / "multi/seed-0/checkpoint.bin"));
  EXPECT_TRUE(fs::exists(dir_ / "multi/seed-1/checkpoint.bin"));
  const auto summary = nlohmann::json::parse(slurp(dir_ / "multi/summary.json"));
  EXPECT_EQ(summary["mean"]["combined_lp"]["runs"], 2);
}

TEST_F(CliTest, EvalReproducesTrainReport) {
  ASSERT_EQ(cli(train_args("run", 5)), kSuccess);
  ASSERT_EQ(cli({"eval", "--checkpoint", path("run/checkpoint.bin"), "--split",
                 path("run/split.json"), "--out", path("eval.json")}),
            kSuccess)
      << err_.str();
  const auto train_report = nlohmann::json::parse(slurp(dir_ / "run/report.json"));
  const auto eval_report = nlohmann::json::parse(slurp(dir_ / "eval.json"));
  for (const char* key : {"auc", "ap", "combined_lp"}) {
    EXPECT_NEAR(train_report[key].get<double>(), eval_report[key].get<double>(), 1e-12) << key;
  }
}

TEST_F(CliTest, EvalRejectsTruncatedCheckpoint) {
  ASSERT_EQ(cli(train_args("run", 1)), kSuccess);
  auto bytes = slurp(dir_ / "run/checkpoint.bin");
  spit(dir_ / "cut.bin", bytes.substr(0, bytes.size() - 100));
  EXPECT_EQ(cli({"eval", "--checkpoint", path("cut.bin"), "--split", path("run/split.json")}),
            kArtifact);
}

TEST_F(CliTest, EvalRejectsDimensionMismatch) {
  ASSERT_EQ(cli(train_args("run", 1)), kSuccess);
  spit(dir_ / "bigger.txt", slurp(dir_ / "edges.txt") + "0 45\n");
  EXPECT_EQ(cli({"eval", "--checkpoint", path("run/checkpoint.bin"), "--split",
                 path("run/split.json"), "--edges", path("bigger.txt")}),
            kArtifact);
}

TEST_F(CliTest, ConfigFileAndOverrides) {
  spit(dir_ / "run.cfg",
       "# training run\nedges = " + path("edges.txt") +
           "\nauto_split = true\nepochs = 4\nhidden1 = 16\nhidden2 = 8\npatience = inf\n");
  ASSERT_EQ(cli({"train", "--config", path("run.cfg"), "--out", path("c1")}), kSuccess) << err_.str();
  auto report = nlohmann::json::parse(slurp(dir_ / "c1/report.json"));
  EXPECT_EQ(report["history"].size(), 4u);
  ASSERT_EQ(cli({"train", "--config", path("run.cfg"), "--epochs", "2", "--out", path("c2")}),
            kSuccess);
  report = nlohmann::json::parse(slurp(dir_ / "c2/report.json"));
  EXPECT_EQ(report["history"].size(), 2u);
}

TEST_F(CliTest, ConfigRejectsUnknownKeys) {
  spit(dir_ / "bad.cfg", "epochs = 2\nlearning_rate = 0.1\n");
  EXPECT_EQ(cli({"train", "--config", path("bad.cfg"), "--edges", path("edges.txt"),
                 "--auto-split", "--out", path("x")}),
            kUsage);
  EXPECT_NE(err_.str().find("learning-rate"), std::string::npos);
}

TEST_F(CliTest, DivergenceExitsWithNumericCode) {
  auto args = train_args("div", 20);
  args.insert(args.end(), {"--lr", "1e308", "--patience", "inf"});
  EXPECT_EQ(cli(args), kNumeric);
  EXPECT_NE(err_.str().find("last finite loss"), std::string::npos);
}

TEST_F(CliTest, ReconstructWritesCurve) {
  ASSERT_EQ(cli({"reconstruct", "--edges", path("edges.txt"), "--missing-frac", "0.8", "--k-list",
                 "10,100,1000", "--epochs", "5", "--hidden1", "16", "--hidden2", "8", "--out",
                 path("curve.csv")}),
            kSuccess)
      << err_.str();
  std::istringstream csv(slurp(dir_ / "curve.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "k,precision");
  std::size_t rows = 0;
  while (std::getline(csv, line)) {
    const double p = std::stod(line.substr(line.find(',') + 1));
    EXPECT_GE(p, 0.0);
    EXPECT_LE(p, 1.0);
    ++rows;
  }
  EXPECT_LE(rows, 3u);
  // 40 nodes have 780 candidate pairs, so k = 1000 is dropped with a warning.
  EXPECT_EQ(rows, 2u);
  EXPECT_NE(err_.str().find("k = 1000"), std::string::npos);
}

TEST_F(CliTest, ReconstructMemorizesTinyGraph) {
  ASSERT_EQ(cli({"reconstruct", "--edges", path("edges.txt"), "--missing-frac", "0", "--k-list",
                 "1", "--epochs", "100", "--out", path("full.csv")}),
            kSuccess);
  EXPECT_EQ(slurp(dir_ / "full.csv"), "k,precision\n1,1\n");
}

TEST_F(CliTest, ReconstructRejectsBadFraction) {
  EXPECT_EQ(cli({"reconstruct", "--edges", path("edges.txt"), "--missing-frac", "1", "--k-list",
                 "1"}),
            kUsage);
}

TEST_F(CliTest, InputsAreNotModified) {
  const auto before = slurp(dir_ / "edges.txt");
  ASSERT_EQ(cli(train_args("run", 1)), kSuccess);
  ASSERT_EQ(cli({"split", "--edges", path("edges.txt"), "--out", path("s")}), kSuccess);
  EXPECT_EQ(slurp(dir_ / "edges.txt"), before);
}

}  // namespace
}  // namespace mtgae::cli
