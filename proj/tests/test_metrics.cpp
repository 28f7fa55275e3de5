#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <numeric>

#include "uavslice/metrics.hpp"

using namespace uavslice;
namespace fs = std::filesystem;

namespace {
fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("uavslice_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}
}  // namespace

TEST_CASE("trailing mean") {
  const std::vector<double> constant(120, 7.0);
  for (double v : trailing_mean(constant, 50)) CHECK(v == 7.0);
  const std::vector<double> one = {3.5};
  CHECK(trailing_mean(one, 50) == std::vector<double>{3.5});

  Rng rng(4);
  std::vector<double> xs;
  for (int i = 0; i < 300; ++i) xs.push_back(rng.uniform(0, 100));
  const auto got = trailing_mean(xs, 50);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const std::size_t lo = i >= 49 ? i - 49 : 0;
    const double want = std::accumulate(xs.begin() + lo, xs.begin() + i + 1, 0.0) / (i + 1 - lo);
    CHECK(got[i] == Catch::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("rewards and summary rows round trip") {
  const auto dir = fresh_dir("rows");
  {
    CsvFile f(dir / "rewards.csv", kRewardsHeader);
    f.row(to_csv(MetricsRow{"train-x", "dqn", 2, 0, 12, 0.5}));
    f.row(to_csv(MetricsRow{"eval-x", "papoc", 2, 1, 1890.5, std::nullopt}));
  }
  const auto rows = read_rewards(dir / "rewards.csv");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].epsilon == 0.5);
  CHECK_FALSE(rows[1].epsilon.has_value());
  CHECK(rows[1].reward == 1890.5);
  CHECK(slurp(dir / "rewards.csv") ==
        "run_id,policy,fleet_size,episode,reward,epsilon\ntrain-x,dqn,2,0,12,0.5\neval-x,papoc,2,1,1890.5,\n");
}

TEST_CASE("plot data from synthetic metrics") {
  const auto dir = fresh_dir("plot");
  fs::create_directories(dir / "train");
  fs::create_directories(dir / "base");
  fs::create_directories(dir / "oracle");
  {
    CsvFile f(dir / "train" / "rewards.csv", kRewardsHeader);
    for (int e = 0; e < 4; ++e) f.row(to_csv(MetricsRow{"train-s1-u2", "dqn", 2, e, double(10 * (e + 1)), 1.0}));
    CsvFile s(dir / "train" / "summary.csv", kSummaryHeader);
    s.row(to_csv(SummaryRow{"eval-s1-u2", "dqn", 2, 4, {25, 20, 30, 2}}));
  }
  {
    CsvFile f(dir / "base" / "rewards.csv", kRewardsHeader);
    for (int e = 0; e < 4; ++e) f.row(to_csv(MetricsRow{"baseline-s1-u2", "papoc", 2, e, 5.0, std::nullopt}));
    f.row(to_csv(MetricsRow{"baseline-s1-u1", "papoc", 1, 0, 99.0, std::nullopt}));
  }
  {
    CsvFile s(dir / "oracle" / "summary.csv", kSummaryHeader);
    s.row(to_csv(SummaryRow{"oracle-s1-u2", "optimal", 2, 4, {50, 48, 52, 1}}));
  }
  const auto out = dir / "out";
  const auto report = emit_plot_data(dir, out, 2, 2);
  CHECK(report.missing_policies == std::vector<std::string>{"random", "rapoc"});
  CHECK(report.fig4_rows == 4);
  CHECK(report.fig5_rows == 2);
  CHECK(slurp(out / "fig4.csv") == "episode,dqn,papoc,optimal\n0,10,5,50\n1,15,5,50\n2,25,5,50\n3,35,5,50\n");
  CHECK(slurp(out / "fig5.csv") == "fleet_size,policy,mean,ci_low,ci_high\n2,dqn,25,20,30\n2,optimal,50,48,52\n");
  CHECK(slurp(out / "fig4.columns.txt").find("missing: random") != std::string::npos);
  CHECK(fs::exists(out / "fig5.columns.txt"));

  CHECK_THROWS_AS(emit_plot_data(fresh_dir("nothing"), out, 2, 50), RuntimeError);
}

TEST_CASE("readers reject foreign files") {
  const auto dir = fresh_dir("foreign");
  std::ofstream(dir / "rewards.csv") << "a,b\n1,2\n";
  CHECK_THROWS_AS(read_rewards(dir / "rewards.csv"), RuntimeError);
}
