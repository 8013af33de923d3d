#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "liplab/cli.hpp"
#include "liplab/io.hpp"
#include "liplab/spacegen.hpp"

namespace liplab {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("liplab_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    out_ = out.str();
    err_ = err.str();
    return code;
  }

  void write_space(const std::string& name, const MetricSpace<double>& space) {
    std::ostringstream buf;
    io::write_space(buf, space);
    io::write_file_atomic(path(name), buf.str());
  }

  void write_field(const std::string& name, std::initializer_list<double> values) {
    std::ostringstream buf;
    buf << "point_id,value\n";
    int i = 0;
    for (double v : values) buf << i++ << ',' << io::format_double(v) << '\n';
    io::write_file_atomic(path(name), buf.str());
  }

  fs::path dir_;
  std::string out_;
  std::string err_;
};

TEST_F(Cli, GenWritesSpaceFiles) {
  ASSERT_EQ(run({"gen", "--kind", "path", "--n", "5", "--out", path("p5.json")}), cli::kOk) << err_;
  EXPECT_EQ(io::read_space_file(path("p5.json")).size(), 5);

  ASSERT_EQ(run({"gen", "--kind", "grid", "--rows", "2", "--cols", "2"}), cli::kOk);
  std::istringstream grid_text(out_);
  EXPECT_EQ(io::read_space(grid_text).dist(0, 3), std::sqrt(2.0));

  ASSERT_EQ(run({"gen", "--kind", "snowflake", "--alpha", "0.5", "--base", path("p5.json"), "--out", path("f.json")}),
            cli::kOk);
  const auto flake = io::read_space_file(path("f.json"));
  const auto expected = snowflake(gen_path(5), 0.5);
  EXPECT_TRUE((flake.dist().array() == expected.dist().array()).all());

  ASSERT_EQ(run({"gen", "--kind", "random_geometric", "--n", "30", "--seed", "4", "--out", path("a.json")}), cli::kOk);
  ASSERT_EQ(run({"gen", "--kind", "random_geometric", "--n", "30", "--seed", "4", "--out", path("b.json")}), cli::kOk);
  EXPECT_EQ(io::read_file(path("a.json")), io::read_file(path("b.json")));
}

TEST_F(Cli, InvalidFlagsExitTwo) {
  EXPECT_EQ(run({}), cli::kInvalidFlags);
  EXPECT_EQ(run({"frobnicate"}), cli::kInvalidFlags);
  EXPECT_EQ(run({"gen", "--kind", "torus"}), cli::kInvalidFlags);
  EXPECT_EQ(run({"gen", "--kind", "path", "--n", "0"}), cli::kInvalidFlags);
  EXPECT_EQ(run({"gen", "--kind", "snowflake", "--alpha", "0.5"}), cli::kInvalidFlags);
  EXPECT_EQ(run({"gen", "--kind", "snowflake", "--alpha", "1", "--base", path("x.json")}), cli::kIoFailure);
  write_space("p3.json", gen_path(3));
  EXPECT_EQ(run({"gen", "--kind", "snowflake", "--alpha", "1", "--base", path("p3.json")}), cli::kInvalidFlags);
  write_field("f.csv", {0, 1, 2});
  EXPECT_EQ(run({"lip", "--space", path("p3.json"), "--field", path("f.csv")}), cli::kInvalidFlags);
  EXPECT_EQ(run({"lip", "--space", path("p3.json"), "--field", path("f.csv"), "--scale", "-1"}), cli::kInvalidFlags);
  EXPECT_EQ(run({"perturb", "--space", path("p3.json"), "--field", path("f.csv"), "--delta", "1", "--r", "0",
                 "--scale", "1"}),
            cli::kInvalidFlags);
  EXPECT_EQ(run({"verify", "--space", path("p3.json"), "--field", path("f.csv"), "--perturbed", path("f.csv"),
                 "--delta", "1", "--r", "0.5", "--scale", "1"}),
            cli::kInvalidFlags);
  EXPECT_FALSE(err_.empty());
  EXPECT_EQ(run({"--help"}), cli::kOk);
}

TEST_F(Cli, IoAndFormatErrorsExitThree) {
  EXPECT_EQ(run({"validate", "--space", path("missing.json")}), cli::kIoFailure);
  io::write_file_atomic(path("bad.json"), "{\"points\": 3}");
  EXPECT_EQ(run({"validate", "--space", path("bad.json")}), cli::kIoFailure);
  write_space("p3.json", gen_path(3));
  io::write_file_atomic(path("bad.csv"), "point_id,value\n0,x\n");
  EXPECT_EQ(run({"lip", "--space", path("p3.json"), "--field", path("bad.csv"), "--scale", "1"}), cli::kIoFailure);
  EXPECT_EQ(run({"gen", "--kind", "path", "--n", "3", "--out", path("no/such/dir/out.json")}), cli::kIoFailure);
}

TEST_F(Cli, IdMismatchExitsFour) {
  write_space("p3.json", gen_path(3));
  write_field("short.csv", {0, 1});
  EXPECT_EQ(run({"lip", "--space", path("p3.json"), "--field", path("short.csv"), "--scale", "1"}), cli::kIdMismatch);
}

TEST_F(Cli, ValidateReportsAndExitCodes) {
  write_space("g.json", gen_grid(2, 2));
  ASSERT_EQ(run({"validate", "--space", path("g.json")}), cli::kOk);
  const auto report = json::parse(out_);
  EXPECT_TRUE(report["metric_ok"].get<bool>());
  EXPECT_NEAR(report["C"].get<double>(), std::sqrt(2.0), 1e-12);

  io::write_file_atomic(path("tri.json"), R"({"points": [{"id": 0, "mass": 0.4}, {"id": 1, "mass": 0.3}, {"id": 2, "mass": 0.3}],
    "edges": [{"u": 0, "v": 1}, {"u": 1, "v": 2}], "dist": [[0, 1, 5], [1, 0, 1], [5, 1, 0]]})");
  EXPECT_EQ(run({"validate", "--space", path("tri.json"), "--out", path("r.json")}), cli::kVerificationFailed);
  EXPECT_EQ(json::parse(io::read_file(path("r.json")))["violation_count"].get<int>(), 1);
}

TEST_F(Cli, LengthMetricFormats) {
  write_space("g.json", gen_grid(2, 2));
  ASSERT_EQ(run({"lengthmetric", "--space", path("g.json")}), cli::kOk);
  EXPECT_EQ(out_, "0,1,2,3\n0,1,1,2\n1,0,2,1\n1,2,0,1\n2,1,1,0\n");
  ASSERT_EQ(run({"lengthmetric", "--space", path("g.json"), "--format", "json"}), cli::kOk);
  EXPECT_EQ(json::parse(out_)["dL"][0][3].get<double>(), 2.0);

  MatrixX<double> d(2, 2);
  d << 0, 1, 1, 0;
  write_space("split.json", MetricSpace<double>(d, {}, VectorX<double>::Constant(2, 0.5)));
  ASSERT_EQ(run({"lengthmetric", "--space", path("split.json")}), cli::kOk);
  EXPECT_EQ(out_, "0,1\n0,inf\ninf,0\n");
  EXPECT_EQ(run({"lengthmetric", "--space", path("split.json"), "--format", "xml"}), cli::kInvalidFlags);
}

TEST_F(Cli, LipProfiles) {
  write_space("p3.json", gen_path(3));
  write_field("const.csv", {4, 4, 4});
  ASSERT_EQ(run({"lip", "--space", path("p3.json"), "--field", path("const.csv"), "--scale", "1"}), cli::kOk);
  EXPECT_EQ(json::parse(out_)["lip"], json::array({0.0, 0.0, 0.0}));
  write_field("ramp.csv", {0, 1, 2});
  ASSERT_EQ(run({"lip", "--space", path("p3.json"), "--field", path("ramp.csv"), "--scale", "1"}), cli::kOk);
  EXPECT_EQ(json::parse(out_)["lip"], json::array({1.0, 1.0, 1.0}));
  write_field("mixed.csv", {0, 0, 1});
  ASSERT_EQ(run({"lip", "--space", path("p3.json"), "--field", path("mixed.csv"), "--scale", "1"}), cli::kOk);
  EXPECT_EQ(json::parse(out_)["lip"], json::array({0.0, 1.0, 1.0}));
}

TEST_F(Cli, PerturbThenVerify) {
  write_space("p5.json", gen_path(5));
  write_field("zero.csv", {0, 0, 0, 0, 0});
  ASSERT_EQ(run({"perturb", "--space", path("p5.json"), "--field", path("zero.csv"), "--delta", "0.4", "--r", "0.5",
                 "--tau", "0.01", "--scale", "1", "--out", path("g.csv"), "--report", path("report.json")}),
            cli::kOk)
      << err_;
  const auto report = json::parse(io::read_file(path("report.json")));
  for (const char* flag : {"norm_ok", "measure_ok", "inclusion_ok", "atom_free", "empty_k_fallback"})
    EXPECT_TRUE(report["flags"][flag].get<bool>()) << flag;
  EXPECT_DOUBLE_EQ(report["lambda"].get<double>(), 0.05);
  const auto g = io::read_field_file(path("g.csv"), 5);
  EXPECT_DOUBLE_EQ(g(4), 0.2);

  const std::vector<std::string> verify_args{"verify", "--space", path("p5.json"), "--field", path("zero.csv"),
                                             "--perturbed", path("g.csv"), "--delta", "0.4", "--r", "0.5",
                                             "--tau", "0.01", "--scale", "1"};
  auto with = [&](std::vector<std::string> extra) {
    auto args = verify_args;
    args.insert(args.end(), extra.begin(), extra.end());
    return args;
  };
  ASSERT_EQ(run(with({"--report", path("report.json")})), cli::kOk) << err_;
  const auto recomputed = json::parse(out_);
  EXPECT_EQ(recomputed["flags"], json({{"norm_ok", true}, {"measure_ok", true}, {"inclusion_ok", true}, {"atom_free", true}}));
  EXPECT_EQ(recomputed["dinf_distance"], report["dinf_distance"]);

  // Verifying f against itself leaves the singular set in place.
  auto self = verify_args;
  self[6] = path("zero.csv");
  self.insert(self.end(), {"--epsilon", "0.5"});
  EXPECT_EQ(run(self), cli::kVerificationFailed);
}

TEST_F(Cli, PerturbEpsilonWarningAndThreshold) {
  write_space("p6.json", gen_path(6));
  write_field("f.csv", {0, 0, 0, 1, 2, 3});
  ASSERT_EQ(run({"perturb", "--space", path("p6.json"), "--field", path("f.csv"), "--delta", "1", "--r", "0.4",
                 "--scale", "1", "--epsilon", "4.5"}),
            cli::kOk)
      << out_;
  EXPECT_TRUE(json::parse(out_)["flags"]["epsilon_warning"].get<bool>());

  write_space("p5.json", gen_path(5));
  write_field("zero.csv", {0, 0, 0, 0, 0});
  EXPECT_EQ(run({"perturb", "--space", path("p5.json"), "--field", path("zero.csv"), "--delta", "0.4", "--r", "0.5",
                 "--tau", "0.5", "--scale", "1"}),
            cli::kThresholdTooCoarse);
}

TEST_F(Cli, PerturbRefusesDisconnectedSpace) {
  MatrixX<double> d(2, 2);
  d << 0, 1, 1, 0;
  write_space("split.json", MetricSpace<double>(d, {}, VectorX<double>::Constant(2, 0.5)));
  write_field("zero.csv", {0, 0});
  EXPECT_EQ(run({"perturb", "--space", path("split.json"), "--field", path("zero.csv"), "--delta", "1", "--r", "0.5",
                 "--scale", "1"}),
            cli::kVerificationFailed);
}

TEST_F(Cli, DemoTables) {
  write_space("p20.json", gen_path(20));
  std::ostringstream zeros;
  zeros << "point_id,value\n";
  for (int i = 0; i < 20; ++i) zeros << i << ",0\n";
  io::write_file_atomic(path("zero.csv"), zeros.str());

  ASSERT_EQ(run({"demo", "--space", path("p20.json"), "--field", path("zero.csv"), "--steps", "5", "--scale", "1"}),
            cli::kOk)
      << err_;
  std::istringstream table(out_);
  std::string line;
  std::getline(table, line);
  EXPECT_EQ(line, "k,r_k,delta_k,singular_measure,dinf_distance,status");
  int rows = 0;
  while (std::getline(table, line)) {
    ++rows;
    EXPECT_NE(line.find(",0,"), std::string::npos) << line;
    EXPECT_EQ(line.substr(line.rfind(',') + 1), "ok");
  }
  EXPECT_EQ(rows, 5);
  const std::string first = out_;
  ASSERT_EQ(run({"demo", "--space", path("p20.json"), "--field", path("zero.csv"), "--steps", "5", "--scale", "1"}),
            cli::kOk);
  EXPECT_EQ(out_, first);

  ASSERT_EQ(run({"demo", "--space", path("p20.json"), "--field", path("zero.csv"), "--steps", "0", "--scale", "1"}),
            cli::kOk);
  EXPECT_EQ(out_, "k,r_k,delta_k,singular_measure,dinf_distance,status\n");

  EXPECT_NE(run({"demo", "--space", path("p20.json"), "--field", path("zero.csv"), "--steps", "5", "--scale", "1",
                 "--tau", "6e-4"}),
            cli::kOk);
  EXPECT_NE(out_.find("threshold_too_coarse"), std::string::npos);
  EXPECT_EQ(std::count(out_.begin(), out_.end(), '\n'), 6);
}

}  // namespace
}  // namespace liplab
