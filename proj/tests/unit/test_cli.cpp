#include "cli.hpp"
#include "facetcvt/mesh.hpp"
#include "facetcvt/primitives.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using namespace facetcvt;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("facetcvt_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    save_mesh(rounded_cube(8), path("in.obj"));
  }
  void TearDown() override { fs::remove_all(dir_); }

  [[nodiscard]] std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return cli::run(args, out_, err_);
  }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

}  // namespace

TEST_F(CliTest, MissingInputIsUsageError) {
  EXPECT_EQ(run({"remesh", "--sites", "100", "--output", path("o.obj")}), cli::kUsageError);
  EXPECT_NE(err_.str().find("--input"), std::string::npos);
}

TEST_F(CliTest, NoSubcommandIsUsageError) { EXPECT_EQ(run({}), cli::kUsageError); }

TEST_F(CliTest, BadParameterIsUsageError) {
  EXPECT_EQ(run({"remesh", "--input", path("in.obj"), "--sites", "100", "--alpha", "2", "--output", path("o.obj")}),
            cli::kUsageError);
  EXPECT_EQ(run({"remesh", "--input", path("in.obj"), "--sites", "100", "--max-clips", "4", "--output",
                 path("o.obj")}),
            cli::kUsageError);
}

TEST_F(CliTest, UnreadableInputIsIoError) {
  EXPECT_EQ(run({"remesh", "--input", path("missing.obj"), "--sites", "100", "--output", path("o.obj")}),
            cli::kIoError);
  std::ofstream(path("bad.obj")) << "v 0 0 0\nv 1 0 0\nf 1 2 7\n";
  EXPECT_EQ(run({"remesh", "--input", path("bad.obj"), "--sites", "100", "--output", path("o.obj")}), cli::kIoError);
}

TEST_F(CliTest, UnwritableOutputIsIoError) {
  EXPECT_EQ(run({"remesh", "--input", path("in.obj"), "--sites", "50", "--max-iters", "1", "--output",
                 path("no/such/dir/o.obj")}),
            cli::kIoError);
}

TEST_F(CliTest, RemeshWritesEverythingAndIsThreadIndependent) {
  auto remesh = [&](const std::string& tag, const std::string& threads) {
    return run({"remesh", "--input", path("in.obj"), "--sites", "150", "--max-iters", "5", "--threads", threads,
                "--time", "2", "--output", path(tag + ".obj"), "--report", path(tag + ".json"), "--manifest",
                path(tag + ".manifest.json"), "--trace", path(tag + ".trace"), "--decisions",
                path(tag + ".decisions")});
  };
  ASSERT_EQ(remesh("a", "1"), cli::kOk) << err_.str();
  ASSERT_EQ(remesh("b", "4"), cli::kOk) << err_.str();
  EXPECT_NE(out_.str().find("Q_avg"), std::string::npos);
  EXPECT_EQ(slurp(path("a.obj")), slurp(path("b.obj")));
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
  EXPECT_EQ(slurp(path("a.decisions")), slurp(path("b.decisions")));
  EXPECT_EQ(load_mesh(path("a.obj")).vertex_count(), 150u);

  std::ifstream trace(path("a.trace"));
  std::size_t lines = 0;
  for (std::string line; std::getline(trace, line);) ++lines;
  EXPECT_EQ(lines, 5u);
  std::ifstream decisions(path("a.decisions"));
  lines = 0;
  for (std::string line; std::getline(decisions, line);) ++lines;
  EXPECT_EQ(lines, 5u * 150u);
  const std::string manifest = slurp(path("a.manifest.json"));
  EXPECT_NE(manifest.find("timing_seconds"), std::string::npos);
  EXPECT_NE(manifest.find("\"alpha\""), std::string::npos);
}

TEST_F(CliTest, MetricsOnIdenticalMeshes) {
  ASSERT_EQ(run({"metrics", "--input", path("in.obj"), "--output-mesh", path("in.obj"), "--samples", "2000",
                 "--report", path("r.json")}),
            cli::kOk)
      << err_.str();
  const std::string r = slurp(path("r.json"));
  EXPECT_NE(r.find("\"d_H\": 0.0"), std::string::npos) << r;
  EXPECT_NE(r.find("\"RMS\": 0.0"), std::string::npos) << r;
  EXPECT_NE(r.find("\"Q_up\": 0.0"), std::string::npos) << r;
}

TEST_F(CliTest, MetricsRejectsNonPositiveTime) {
  EXPECT_EQ(run({"metrics", "--input", path("in.obj"), "--output-mesh", path("in.obj"), "--time", "0"}),
            cli::kUsageError);
}

TEST_F(CliTest, SweepSingleCellAndGrid) {
  ASSERT_EQ(run({"sweep", "--input", path("in.obj"), "--sites", "60", "--max-iters", "1", "--alpha-grid",
                 "0.8:0.8:0.1", "--beta-grid", "0.7:0.7:0.1"}),
            cli::kOk)
      << err_.str();
  std::istringstream one(out_.str());
  std::vector<std::string> rows;
  for (std::string line; std::getline(one, line);) rows.push_back(line);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], "alpha,beta,Q_avg,T");
  EXPECT_EQ(rows[1].rfind("0.8,0.7,", 0), 0u) << rows[1];

  ASSERT_EQ(run({"sweep", "--input", path("in.obj"), "--sites", "60", "--max-iters", "1", "--alpha-grid",
                 "0.6:0.9:0.1", "--beta-grid", "0.5:0.8:0.1", "--csv", path("s.csv")}),
            cli::kOk)
      << err_.str();
  std::istringstream grid(slurp(path("s.csv")));
  std::size_t count = 0;
  for (std::string line; std::getline(grid, line);) ++count;
  EXPECT_EQ(count, 17u);
}

TEST_F(CliTest, GenerateWritesAMesh) {
  ASSERT_EQ(run({"generate", "--shape", "torus", "--resolution", "8", "--output", path("t.obj")}), cli::kOk);
  EXPECT_GT(load_mesh(path("t.obj")).face_count(), 0u);
  EXPECT_EQ(run({"generate", "--shape", "teapot", "--resolution", "8", "--output", path("t.obj")}), cli::kUsageError);
}

TEST(ParseGrid, Inclusive) {
  const auto g = cli::parse_grid("0.6:0.9:0.1");
  ASSERT_EQ(g.size(), 4u);
  EXPECT_NEAR(g.front(), 0.6, 1e-12);
  EXPECT_NEAR(g.back(), 0.9, 1e-12);
  EXPECT_EQ(cli::parse_grid("0.5:0.5:0.1"), std::vector<double>{0.5});
  EXPECT_THROW((void)cli::parse_grid("0.5:0.1:0.1"), InvalidArgument);
  EXPECT_THROW((void)cli::parse_grid("0.1:0.5:0"), InvalidArgument);
  EXPECT_THROW((void)cli::parse_grid("0.1:0.5"), InvalidArgument);
  EXPECT_THROW((void)cli::parse_grid("a:b:c"), InvalidArgument);
}

TEST_F(CliTest, DefaultThresholdsAreNearTheSweepMaximum) {
  save_mesh(make_primitive("fillet-cube", 16), path("fillet.obj"));
  ASSERT_EQ(run({"sweep", "--input", path("fillet.obj"), "--sites", "400", "--max-iters", "30", "--alpha-grid",
                 "0.6:0.9:0.1", "--beta-grid", "0.5:0.8:0.1"}),
            cli::kOk)
      << err_.str();
  std::istringstream csv(out_.str());
  std::string line;
  std::getline(csv, line);
  double best = 0.0;
  double at_default = -1.0;
  std::size_t rows = 0;
  while (std::getline(csv, line)) {
    std::istringstream row(line);
    std::string a, b, q;
    std::getline(row, a, ',');
    std::getline(row, b, ',');
    std::getline(row, q, ',');
    const double qa = std::stod(q);
    EXPECT_GE(qa, 0.0);
    EXPECT_LE(qa, 1.0);
    best = std::max(best, qa);
    if (std::abs(std::stod(a) - 0.8) < 1e-9 && std::abs(std::stod(b) - 0.7) < 1e-9) at_default = qa;
    ++rows;
  }
  EXPECT_EQ(rows, 16u);
  ASSERT_GE(at_default, 0.0);
  EXPECT_GE(at_default, best - 0.02) << out_.str();
}

TEST_F(CliTest, ManifestPhaseTimesAddUp) {
  ASSERT_EQ(run({"remesh", "--input", path("in.obj"), "--sites", "200", "--max-iters", "5", "--samples", "20000",
                 "--output", path("o.obj"), "--manifest", path("m.json")}),
            cli::kOk);
  const std::string m = slurp(path("m.json"));
  auto number = [&](const std::string& key) {
    const auto at = m.find("\"" + key + "\":");
    EXPECT_NE(at, std::string::npos) << key;
    return std::stod(m.substr(at + key.size() + 3));
  };
  double sum = 0.0;
  for (const char* phase : {"load", "sampling", "iterations", "extraction", "metrics"}) {
    const double t = number(phase);
    EXPECT_GE(t, 0.0) << phase;
    sum += t;
  }
  EXPECT_LE(sum, 1.05 * number("total"));
  EXPECT_EQ(number("report_T"), number("remesh"));
}
