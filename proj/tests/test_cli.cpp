#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "uavslice/cli.hpp"

using namespace uavslice;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "uavslice");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("uavslice_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("zero-episode training writes a header-only rewards file") {
  const auto dir = fresh_dir("zero");
  const auto r = invoke({"train", "--episodes", "0", "--set", "eval_episodes=1", "--out", dir.string()});
  REQUIRE(r.code == 0);
  CHECK(slurp(dir / "rewards.csv") == std::string(kRewardsHeader) + "\n");
  CHECK(fs::exists(dir / "checkpoint.txt"));
  CHECK(fs::exists(dir / "manifest.txt"));
  CHECK(read_summary(dir / "summary.csv").size() == 1);
}

TEST_CASE("baseline sweep: three summaries, matching centroid trajectories, reproducible") {
  const auto a = fresh_dir("base_a"), b = fresh_dir("base_b");
  REQUIRE(invoke({"baseline", "--seed", "3", "--episodes", "4", "--out", a.string()}).code == 0);
  REQUIRE(invoke({"baseline", "--seed", "3", "--episodes", "4", "--out", b.string()}).code == 0);
  const auto summary = read_summary(a / "summary.csv");
  REQUIRE(summary.size() == 3);
  CHECK(summary[0].policy == "random");
  CHECK(summary[1].policy == "rapoc");
  CHECK(summary[2].policy == "papoc");
  CHECK(slurp(a / "rewards.csv") == slurp(b / "rewards.csv"));
  CHECK(slurp(a / "summary.csv") == slurp(b / "summary.csv"));

  // Strip the policy column and compare the centroid heuristics' paths.
  std::map<std::string, std::vector<std::string>> paths;
  std::ifstream in(a / "trajectories.csv");
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    auto cells = split_csv_line(line);
    const std::string policy = cells[1];
    cells.erase(cells.begin() + 1);
    std::string rest;
    for (const auto& c : cells) rest += c + ",";
    paths[policy].push_back(rest);
  }
  REQUIRE_FALSE(paths["rapoc"].empty());
  CHECK(paths["rapoc"] == paths["papoc"]);

  const auto single = fresh_dir("base_single");
  REQUIRE(invoke({"baseline", "--policy", "papoc", "--episodes", "2", "--out", single.string()}).code == 0);
  CHECK(read_summary(single / "summary.csv").size() == 1);
}

TEST_CASE("oracle summary dominates baselines on the same seeds") {
  const auto base = fresh_dir("dom_base"), orc = fresh_dir("dom_oracle");
  REQUIRE(invoke({"baseline", "--seed", "4", "--episodes", "3", "--out", base.string()}).code == 0);
  REQUIRE(invoke({"oracle", "--seed", "4", "--episodes", "3", "--out", orc.string()}).code == 0);
  const auto best = read_summary(orc / "summary.csv").at(0);
  CHECK(best.policy == "optimal");
  for (const auto& s : read_summary(base / "summary.csv")) CHECK(best.stats.mean >= s.stats.mean);
  const auto solutions = read_csv(orc / "oracle.csv",
                                  "run_id,episode,uav,x,y,bw_em,bw_ur,bw_mm,objective,evaluations,exact");
  CHECK(solutions.size() == 6);

  const auto plots = fresh_dir("dom_plot");
  const auto r = invoke({"plotdata", "--metrics", fs::temp_directory_path().string() + "/uavslice_cli_dom_base",
                      "--out", plots.string()});
  CHECK(r.code == 0);
  CHECK(r.err.find("dqn") != std::string::npos);
  CHECK(fs::exists(plots / "fig4.csv"));
  CHECK(fs::exists(plots / "fig5.csv"));
}

TEST_CASE("train then eval from the checkpoint") {
  const auto dir = fresh_dir("train_eval");
  REQUIRE(invoke({"train", "--seed", "2", "--episodes", "2", "--set", "steps_per_episode=20", "--set", "eval_episodes=2",
               "--out", dir.string()})
              .code == 0);
  const auto rows = read_rewards(dir / "rewards.csv");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].run_id == "train-seed2-uavs2");
  CHECK(rows[1].episode == 1);
  CHECK(rows[0].epsilon.has_value());

  const auto ev = fresh_dir("train_eval_2");
  REQUIRE(invoke({"eval", "--seed", "2", "--episodes", "2", "--set", "steps_per_episode=20", "--checkpoint",
               (dir / "checkpoint.txt").string(), "--out", ev.string()})
              .code == 0);
  // Same greedy policy on the same evaluation worlds as train's own evaluation.
  CHECK(read_summary(ev / "summary.csv")[0].stats.mean == read_summary(dir / "summary.csv")[0].stats.mean);

  const auto wrong = fresh_dir("train_eval_3");
  CHECK(invoke({"eval", "--uavs", "3", "--checkpoint", (dir / "checkpoint.txt").string(), "--out", wrong.string()}).code ==
        2);
}

TEST_CASE("exit codes") {
  const auto dir = fresh_dir("codes");
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"fly"}).code == 2);
  CHECK(invoke({"baseline", "--episodes", "x"}).code == 2);
  CHECK(invoke({"baseline", "--set", "p_embb=0.5", "--set", "p_urllc=0.6", "--out", dir.string()}).code == 2);
  CHECK(invoke({"baseline", "--config", "/nonexistent.cfg", "--out", dir.string()}).code == 2);
  CHECK(invoke({"eval", "--checkpoint", "/nonexistent/ck.txt", "--out", dir.string()}).code == 3);
  CHECK(invoke({"plotdata", "--metrics", (dir / "empty").string(), "--out", dir.string()}).code == 3);
}

TEST_CASE("config file with flag overrides lands in the manifest") {
  const auto dir = fresh_dir("manifest");
  fs::create_directories(dir);
  std::ofstream(dir / "run.cfg") << "uavs=3\nseed=9\nsteps_per_episode=5\n";
  REQUIRE(invoke({"baseline", "--config", (dir / "run.cfg").string(), "--uavs", "5", "--episodes", "1", "--out",
               (dir / "out").string()})
              .code == 0);
  const auto manifest = slurp(dir / "out" / "manifest.txt");
  CHECK(manifest.find("uavs=5\n") != std::string::npos);
  CHECK(manifest.find("seed=9\n") != std::string::npos);
  CHECK(manifest.find("subcommand=baseline\n") != std::string::npos);
  const auto rows = read_rewards(dir / "out" / "rewards.csv");
  CHECK(rows.at(0).fleet_size == 5);
  CHECK(rows.at(0).reward <= 63 * 5);
}
