// nacs_sim: run, compare, sweep and graph commands over scenario files.
//
// Exit status: 0 success, 2 invalid scenario or command line, 3 I/O failure.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "nacs/scenario_io.hpp"
#include "nacs/sim_engine.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string scenario;
  std::vector<std::string> schemes;
  std::optional<std::uint64_t> seed;
  std::string mns;
  std::string seeds;
  std::string out;
  std::optional<double> duration;
  std::string which;
  std::string trace;
  std::string graph_out;
};

std::vector<std::uint64_t> parse_list(const std::string& text, const char* flag) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto v = nacs::parse_int<std::uint64_t>(item);
    if (!v) throw UsageError(std::string(flag) + ": '" + item + "' is not a non-negative integer");
    out.push_back(*v);
  }
  if (out.empty()) throw UsageError(std::string(flag) + ": empty list");
  return out;
}

std::vector<std::uint32_t> parse_mns(const std::string& text) {
  std::vector<std::uint32_t> out;
  for (auto v : parse_list(text, "--mns")) {
    if (v < 1 || v > 1'000'000) throw UsageError("--mns: counts must be between 1 and 1000000");
    out.push_back(static_cast<std::uint32_t>(v));
  }
  return out;
}

nacs::Scenario load(const Options& o) {
  auto s = nacs::load_scenario(o.scenario);
  if (o.seed) s.mobility.seed = *o.seed;
  if (o.duration) s.duration_s = *o.duration;
  try {
    s.validate();
  } catch (const nacs::ValidationError& e) {
    throw UsageError(e.what());
  }
  return s;
}

std::vector<nacs::SchemeKind> parse_schemes(const std::vector<std::string>& texts) {
  std::vector<nacs::SchemeKind> out;
  for (const auto& t : texts) {
    try {
      out.push_back(nacs::parse_scheme(t));
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  return out;
}

fs::path prepare_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw nacs::InputError("cannot create output directory '" + dir + "': " + ec.message());
  return fs::path(dir);
}

template <class Fn>
void write_file(const fs::path& path, Fn&& body) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw nacs::InputError("cannot write '" + path.string() + "'");
  body(os);
  os.flush();
  if (!os) throw nacs::InputError("write failed for '" + path.string() + "'");
}

void write_header(std::ostream& os, const Options& o, const nacs::Scenario& s, const std::string& command_line) {
  os << "scenario: " << o.scenario << '\n'
     << "seed: " << s.mobility.seed << '\n'
     << "duration_s: " << nacs::format_double(s.duration_s) << '\n'
     << "command: " << command_line << '\n';
}

int cmd_run(const Options& o, const std::string& command_line) {
  auto s = load(o);
  if (!o.schemes.empty()) {
    auto kinds = parse_schemes(o.schemes);
    if (kinds.size() != 1) throw UsageError("run takes a single --scheme");
    s.scheme = kinds.front();
  }
  if (!o.mns.empty()) {
    auto counts = parse_mns(o.mns);
    if (counts.size() != 1) throw UsageError("run takes a single --mns value; use sweep or compare for lists");
    s.n_mobile_nodes = counts.front();
  }
  auto result = nacs::run(s);
  auto dir = prepare_dir(o.out);
  write_file(dir / "events.csv", [&](std::ostream& os) { nacs::write_event_csv(os, result.trace); });
  write_file(dir / "messages.csv", [&](std::ostream& os) { nacs::write_message_csv(os, result); });
  write_file(dir / "metrics.csv", [&](std::ostream& os) {
    nacs::write_metrics_header(os);
    nacs::write_metrics_rows(os, result, s.mobility.seed);
  });
  write_file(dir / "cp_matrix.csv", [&](std::ostream& os) { nacs::write_cp_csv(os, result); });
  write_file(dir / "summary.txt", [&](std::ostream& os) {
    write_header(os, o, s, command_line);
    nacs::write_summary(os, result);
  });
  std::cout << "chp " << nacs::format_fixed(result.summary.chp) << " proactive_cost "
            << nacs::format_fixed(result.summary.proactive_cost) << " -> " << dir.string() << '\n';
  return 0;
}

int cmd_compare(const Options& o, const std::string& command_line) {
  auto s = load(o);
  auto kinds = parse_schemes(o.schemes);
  if (kinds.size() < 2) throw UsageError("compare needs at least two --scheme values");
  auto counts = o.mns.empty() ? std::vector<std::uint32_t>{s.n_mobile_nodes} : parse_mns(o.mns);

  std::ostringstream csv, summary;
  nacs::write_metrics_header(csv);
  write_header(summary, o, s, command_line);
  for (auto n : counts) {
    s.n_mobile_nodes = n;
    auto trace = nacs::generate_trace(s);
    std::optional<nacs::RunResult> pnc;
    for (const auto& k : kinds)
      if (nacs::is_pnc(k)) pnc = nacs::replay(trace, s, k);
    for (const auto& k : kinds) {
      auto r = nacs::is_pnc(k) && pnc ? *pnc : nacs::replay(trace, s, k);
      if (pnc) nacs::attach_pnc_ratio(r, *pnc);
      nacs::write_metrics_rows(csv, r, s.mobility.seed, pnc ? &*pnc : nullptr);
      summary << "\n[n_mns=" << n << "]\n";
      nacs::write_summary(summary, r);
    }
  }
  auto dir = prepare_dir(o.out);
  write_file(dir / "comparison.csv", [&](std::ostream& os) { os << csv.str(); });
  write_file(dir / "summary.txt", [&](std::ostream& os) { os << summary.str(); });
  std::cout << "compared " << kinds.size() << " schemes over " << counts.size() << " MN counts -> " << dir.string() << '\n';
  return 0;
}

int cmd_sweep(const Options& o, const std::string& command_line) {
  auto base = load(o);
  auto kinds = o.schemes.empty() ? std::vector<nacs::SchemeKind>{base.scheme} : parse_schemes(o.schemes);
  auto counts = o.mns.empty() ? std::vector<std::uint32_t>{base.n_mobile_nodes} : parse_mns(o.mns);
  auto seeds = o.seeds.empty() ? std::vector<std::uint64_t>{base.mobility.seed} : parse_list(o.seeds, "--seeds");

  struct Point {
    nacs::SchemeKind kind;
    std::uint32_t n;
    std::uint64_t seed;
  };
  std::vector<Point> points;
  for (const auto& k : kinds)
    for (auto n : counts)
      for (auto sd : seeds) points.push_back({k, n, sd});

  // Each point is an independent run; rows are written in point order.
  auto run_point = [&base](const Point& p) {
    auto s = base;
    s.scheme = p.kind;
    s.n_mobile_nodes = p.n;
    s.mobility.seed = p.seed;
    std::ostringstream rows;
    nacs::write_metrics_rows(rows, nacs::run(s), p.seed);
    return rows.str();
  };
  const std::size_t width = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::string> rows(points.size());
  for (std::size_t begin = 0; begin < points.size(); begin += width) {
    std::vector<std::future<std::string>> wave;
    for (std::size_t i = begin; i < std::min(points.size(), begin + width); ++i)
      wave.push_back(std::async(std::launch::async, run_point, points[i]));
    for (std::size_t i = 0; i < wave.size(); ++i) rows[begin + i] = wave[i].get();
  }
  auto dir = prepare_dir(o.out);
  write_file(dir / "sweep.csv", [&](std::ostream& os) {
    nacs::write_metrics_header(os);
    for (const auto& r : rows) os << r;
  });
  write_file(dir / "summary.txt", [&](std::ostream& os) {
    write_header(os, o, base, command_line);
    os << "points: " << points.size() << '\n';
  });
  std::cout << "swept " << points.size() << " points -> " << dir.string() << '\n';
  return 0;
}

int cmd_graph(const Options& o) {
  auto s = load(o);
  auto overlap = nacs::build_overlap_graph(s.topology);
  std::optional<nacs::ApGraph> neighbor;
  if (!o.trace.empty()) {
    std::ifstream in(o.trace, std::ios::binary);
    if (!in) throw nacs::InputError("cannot open trace '" + o.trace + "'");
    auto trace = nacs::read_event_csv(in);
    try {
      neighbor = nacs::learn_neighbor_graph(s.topology.ids(), nacs::reassociations(trace));
    } catch (const std::invalid_argument& e) {
      throw nacs::ScenarioError("trace", e.what());
    }
  }

  nacs::ApGraph g;
  if (o.which == "overlap") {
    g = overlap;
  } else if (o.which == "neighbor") {
    if (!neighbor) throw UsageError("graph --which neighbor needs --trace <events.csv>");
    g = *neighbor;
  } else if (o.which == "nong") {
    auto mode = nacs::NongMode::complement;
    if (const auto* n = std::get_if<nacs::scheme::Nacs>(&s.scheme)) mode = n->mode;
    if (mode == nacs::NongMode::automatic) mode = neighbor ? nacs::NongMode::intersection : nacs::NongMode::complement;
    if (mode == nacs::NongMode::intersection && !neighbor)
      throw UsageError("graph --which nong in intersection mode needs --trace <events.csv>");
    g = mode == nacs::NongMode::complement ? nacs::build_nong(overlap) : nacs::build_nong(overlap, &*neighbor);
  } else {
    throw UsageError("--which must be neighbor, overlap or nong");
  }

  if (o.graph_out.empty()) {
    nacs::write_edge_list(std::cout, g);
  } else {
    write_file(o.graph_out, [&](std::ostream& os) { nacs::write_edge_list(os, g); });
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::string command_line;
  for (int i = 0; i < argc; ++i) command_line += (i ? " " : "") + std::string(argv[i]);

  CLI::App app{"802.11 handoff context-caching simulator"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--scenario", o.scenario, "Scenario JSON file")->required();
    sub->add_option("--seed", o.seed, "Override the scenario seed");
    sub->add_option("--duration", o.duration, "Override the duration in seconds");
  };

  auto* run = app.add_subcommand("run", "Run one scenario and write events, messages, metrics and summary");
  add_common(run);
  run->add_option("--scheme", o.schemes, "Scheme kind[:param], e.g. pnc, snc:0.15, nacs:intersection");
  run->add_option("--mns", o.mns, "Number of mobile nodes");
  run->add_option("--out", o.out, "Output directory")->default_val("out");

  auto* compare = app.add_subcommand("compare", "Replay one mobility trace under several schemes");
  add_common(compare);
  compare->add_option("--scheme", o.schemes, "Scheme to compare (repeat)")->required();
  compare->add_option("--mns", o.mns, "Comma-separated MN counts");
  compare->add_option("--out", o.out, "Output directory")->default_val("out");

  auto* sweep = app.add_subcommand("sweep", "Independent runs over schemes x MN counts x seeds");
  add_common(sweep);
  sweep->add_option("--scheme", o.schemes, "Scheme (repeat); defaults to the scenario's");
  sweep->add_option("--mns", o.mns, "Comma-separated MN counts");
  sweep->add_option("--seeds", o.seeds, "Comma-separated seeds");
  sweep->add_option("--out", o.out, "Output directory")->default_val("out");

  auto* graph = app.add_subcommand("graph", "Write the neighbor, overlap or non-overlap graph as an edge list");
  add_common(graph);
  graph->add_option("--which", o.which, "neighbor | overlap | nong")->required();
  graph->add_option("--trace", o.trace, "Event trace CSV (needed for the neighbor graph)");
  graph->add_option("--out", o.graph_out, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (run->parsed()) return cmd_run(o, command_line);
    if (compare->parsed()) return cmd_compare(o, command_line);
    if (sweep->parsed()) return cmd_sweep(o, command_line);
    if (graph->parsed()) return cmd_graph(o);
  } catch (const nacs::ScenarioError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const nacs::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const nacs::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
