#include <gtest/gtest.h>
#include <sys/wait.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "nacs/scenario_io.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;

namespace nacs {
namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::path(NACS_TEST_WORKDIR) / "cli" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int sim(const std::string& args) {
  std::string cmd = std::string(NACS_SIM_PATH) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) { return read_file(p.string()); }

std::string fig4_path() { return testing::source_path("scenarios/fig4.json"); }

fs::path small_scenario(const fs::path& dir, const std::string& aps_json) {
  auto p = dir / "scenario.json";
  std::ofstream(p) << R"({"aps": )" << aps_json << R"(,
    "world": {"width": 200, "height": 100},
    "mobility": {"model": "random_waypoint", "speed_min": 1, "speed_max": 3, "pause": 0, "tick": 0.1},
    "mns": 4, "scheme": {"kind": "pnc"}, "duration_s": 20, "seed": 1})";
  return p;
}

TEST(Cli, RunWritesAllOutputs) {
  auto out = scratch("run");
  ASSERT_EQ(sim("run --scenario " + fig4_path() + " --duration 60 --out " + out.string()), 0);
  for (const char* f : {"events.csv", "messages.csv", "metrics.csv", "cp_matrix.csv", "summary.txt"})
    EXPECT_TRUE(fs::exists(out / f)) << f;
}

TEST(Cli, SameSeedGivesIdenticalFiles) {
  auto a = scratch("seed_a"), b = scratch("seed_b");
  ASSERT_EQ(sim("run --scenario " + fig4_path() + " --seed 42 --duration 60 --out " + a.string()), 0);
  ASSERT_EQ(sim("run --scenario " + fig4_path() + " --seed 42 --duration 60 --out " + b.string()), 0);
  for (const char* f : {"events.csv", "messages.csv", "metrics.csv", "cp_matrix.csv"}) EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
}

TEST(Cli, CompareSncZeroMatchesPncCost) {
  auto out = scratch("compare");
  ASSERT_EQ(sim("compare --scenario " + fig4_path() + " --duration 120 --scheme pnc --scheme snc:0 --mns 10 --out " + out.string()), 0);
  std::istringstream csv(slurp(out / "comparison.csv"));
  std::string header, line;
  std::getline(csv, header);
  std::vector<std::string> header_cells, pnc_cells, snc_cells;
  auto split = [](const std::string& s) {
    std::vector<std::string> v;
    std::string c;
    std::istringstream ss(s);
    while (std::getline(ss, c, ',')) v.push_back(c);
    return v;
  };
  header_cells = split(header);
  while (std::getline(csv, line)) {
    auto cells = split(line);
    if (line.find(",pnc,") != std::string::npos) pnc_cells = cells;
    if (line.find(",snc:0,") != std::string::npos) snc_cells = cells;
  }
  ASSERT_FALSE(pnc_cells.empty());
  ASSERT_FALSE(snc_cells.empty());
  auto col = std::find(header_cells.begin(), header_cells.end(), "proactive_cost") - header_cells.begin();
  ASSERT_LT(static_cast<std::size_t>(col), header_cells.size());
  EXPECT_EQ(pnc_cells[col], snc_cells[col]);
}

TEST(Cli, CompareNeedsTwoSchemes) {
  auto out = scratch("compare_one");
  EXPECT_EQ(sim("compare --scenario " + fig4_path() + " --scheme pnc --out " + out.string()), 2);
}

TEST(Cli, ExitCodes) {
  auto out = scratch("codes");
  EXPECT_EQ(sim("run --scenario /nonexistent.json --out " + out.string()), 3);
  std::ofstream(out / "bad.json") << "{\"aps\": []}";
  EXPECT_EQ(sim("run --scenario " + (out / "bad.json").string() + " --out " + out.string()), 2);
  EXPECT_EQ(sim("run --scenario " + fig4_path() + " --scheme bogus --out " + out.string()), 2);
  EXPECT_EQ(sim("run --scenario " + fig4_path() + " --duration 0 --out " + out.string()), 2);
  EXPECT_EQ(sim("frobnicate"), 2);
  EXPECT_EQ(sim("graph --scenario " + fig4_path() + " --which neighbor"), 2);
}

TEST(Cli, GraphSingleApIsEmpty) {
  auto dir = scratch("graph_single");
  auto sc = small_scenario(dir, R"([{"id": "A", "x": 100, "y": 50, "radius": 40}])");
  ASSERT_EQ(sim("graph --scenario " + sc.string() + " --which overlap --out " + (dir / "g.txt").string()), 0);
  EXPECT_EQ(slurp(dir / "g.txt"), "");
}

TEST(Cli, GraphNongComplementEdgeCount) {
  auto dir = scratch("graph_nong");
  auto sc = small_scenario(dir, R"([{"id": "A", "x": 20, "y": 50, "radius": 40},
    {"id": "B", "x": 80, "y": 50, "radius": 40}, {"id": "C", "x": 140, "y": 50, "radius": 40},
    {"id": "D", "x": 190, "y": 50, "radius": 5}])");
  auto text = slurp(sc);
  text.replace(text.find("{\"kind\": \"pnc\"}"), 15, R"({"kind": "nacs", "nong_mode": "complement"})");
  std::ofstream(sc) << text;
  ASSERT_EQ(sim("graph --scenario " + sc.string() + " --which overlap --out " + (dir / "o.txt").string()), 0);
  ASSERT_EQ(sim("graph --scenario " + sc.string() + " --which nong --out " + (dir / "n.txt").string()), 0);
  auto count = [](const std::string& s) { return std::count(s.begin(), s.end(), '\n'); };
  EXPECT_EQ(slurp(dir / "o.txt"), "A B\nB C\n");
  EXPECT_EQ(count(slurp(dir / "n.txt")), 4);
}

TEST(Cli, GraphNeighborFromTrace) {
  auto out = scratch("graph_trace");
  ASSERT_EQ(sim("run --scenario " + fig4_path() + " --duration 120 --out " + out.string()), 0);
  ASSERT_EQ(sim("graph --scenario " + fig4_path() + " --which neighbor --trace " + (out / "events.csv").string() +
                " --out " + (out / "ng.txt").string()),
            0);
  std::ifstream ev(out / "events.csv");
  auto trace = read_event_csv(ev);
  auto s = testing::fig4();
  std::ostringstream expected;
  write_edge_list(expected, learn_neighbor_graph(s.topology.ids(), reassociations(trace)));
  EXPECT_EQ(slurp(out / "ng.txt"), expected.str());
}

}  // namespace
}  // namespace nacs
