// scmnet: simulate message-passing systems and measure their statistical
// complexity.
//
//   scmnet simulate --config topo.cfg --out counts.csv [--seed N] [--trace events.jsonl]
//   scmnet analyze  --input counts.csv [--out result.csv] [--format csv|json] [--window T0,T1]
//   scmnet sweep    --grid grid.cfg --out-dir results/ [--workers N] [--no-charts]
//   scmnet qmax     N
//   scmnet report   --input results/report.json [--out-dir charts/] [--duration T]
//
// Exit codes: 0 success, 1 I/O failure, 2 validation failure, 3 partial
// sweep failure. SCMNET_WORKERS sets the default sweep worker count.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "scmnet/config.hpp"
#include "scmnet/error.hpp"
#include "scmnet/experiments.hpp"
#include "scmnet/ingest.hpp"
#include "scmnet/scm.hpp"
#include "scmnet/sim.hpp"

namespace fs = std::filesystem;
using namespace scmnet;

namespace {

constexpr int kExitIo = 1;
constexpr int kExitValidation = 2;
constexpr int kExitPartialSweep = 3;

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  return out;
}

fs::path sidecar_for(const fs::path& path) {
  fs::path p = path;
  return p.replace_extension(".meta.json");
}

std::string num(double v, const char* f = "%.12g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::size_t default_workers() {
  if (const char* env = std::getenv("SCMNET_WORKERS")) {
    try {
      const auto w = std::stoul(env);
      if (w > 0) return w;
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

int do_simulate(const std::string& config_path, std::optional<std::uint64_t> seed, const fs::path& out,
                const std::string& trace_path) {
  auto cfg = load_topology(config_path);
  if (seed) cfg.seed = *seed;

  RunStats stats;
  CountMatrix counts;
  if (trace_path.empty()) {
    counts = run(cfg, &stats);
  } else {
    auto trace = open_out(trace_path);
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < cfg.n; ++i) labels.push_back("c" + std::to_string(i));
    counts = run(cfg, &stats, [&](const SendEvent& e) { write_event_jsonl(trace, e.time, labels[e.src], labels[e.dst]); });
  }

  {
    auto csv = open_out(out);
    write_matrix_csv(csv, counts);
  }
  auto meta = meta_json(counts);
  meta["total_events"] = stats.send_events;
  meta["generated"] = stats.generated;
  meta["forwarded"] = stats.forwarded;
  meta["wall_seconds"] = stats.wall_seconds;
  meta["config_echo"] = {{"n", cfg.n},
                         {"gen_rate", cfg.gen_rate},
                         {"hop_limit", cfg.hop_limit},
                         {"latency", cfg.latency},
                         {"duration", cfg.duration},
                         {"seed", cfg.seed},
                         {"variant", cfg.describe()}};
  auto side = open_out(sidecar_for(out));
  side << meta.dump(2) << '\n';
  std::cerr << "wrote " << out.string() << " (" << stats.send_events << " sends)\n";
  return 0;
}

nlohmann::json result_json(const ScmResult& r, const std::vector<std::string>& labels) {
  nlohmann::json comps = nlohmann::json::array();
  for (std::size_t i = 0; i < r.per_component.size(); ++i) {
    const auto& c = r.per_component[i];
    comps.push_back({{"component", labels[i]}, {"active", c.active}, {"entropy", c.entropy}, {"jsd", c.jsd}});
  }
  return {{"label", r.meta.label},   {"n", labels.size()},       {"h_raw", r.h_raw},
          {"q_raw", r.q_raw},        {"h_norm", r.h_norm},       {"q_norm", r.q_norm},
          {"scm_raw", r.scm_raw},    {"scm_hq", r.scm_hq},       {"q_max", q_max(labels.size())},
          {"per_component", comps}};
}

void write_result_csv(std::ostream& out, const ScmResult& r, const std::vector<std::string>& labels) {
  out << "metric,value\n";
  out << "n," << labels.size() << '\n';
  out << "h_raw," << num(r.h_raw) << '\n';
  out << "q_raw," << num(r.q_raw) << '\n';
  out << "h_norm," << num(r.h_norm) << '\n';
  out << "q_norm," << num(r.q_norm) << '\n';
  out << "scm_raw," << num(r.scm_raw) << '\n';
  out << "scm_hq," << num(r.scm_hq) << '\n';
  out << "q_max," << num(q_max(labels.size())) << '\n';
  out << '\n' << "component,active,entropy,jsd\n";
  for (std::size_t i = 0; i < r.per_component.size(); ++i) {
    const auto& c = r.per_component[i];
    out << labels[i] << ',' << (c.active ? 1 : 0) << ',' << num(c.entropy) << ',' << num(c.jsd) << '\n';
  }
}

std::optional<TimeWindow> parse_window(const std::string& text) {
  if (text.empty()) return std::nullopt;
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw Error(ErrorKind::BadConfig, "'window' must be T0,T1");
  try {
    return TimeWindow{std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
  } catch (const std::exception&) {
    throw Error(ErrorKind::BadConfig, "'window' must be T0,T1");
  }
}

int do_analyze(const fs::path& input, const std::string& out, const std::string& format,
               const std::string& window) {
  const auto counts = load_counts(input, parse_window(window));
  const auto result = analyze(counts);
  const auto labels = counts.effective_labels();

  std::ostringstream body;
  if (format == "json")
    body << result_json(result, labels).dump(2) << '\n';
  else
    write_result_csv(body, result, labels);

  if (out.empty() || out == "-") {
    std::cout << body.str();
  } else {
    auto f = open_out(out);
    f << body.str();
  }
  return 0;
}

void write_charts(const SweepReport& report, const fs::path& dir) {
  std::set<std::pair<std::size_t, double>> groups;
  for (const auto& c : report.cells) groups.insert({c.n, c.duration});
  for (const auto& [n, t] : groups) {
    auto f = open_out(dir / ("chart_n" + std::to_string(n) + "_t" + num(t, "%g") + ".svg"));
    f << render_chart_svg(report, n, t);
  }
}

int do_sweep(const std::string& grid_path, const fs::path& out_dir, std::size_t workers, bool charts) {
  const auto grid = load_grid(grid_path);
  std::cerr << "sweep: " << grid.run_count() << " runs on " << workers << " worker(s)\n";

  SweepOptions opts;
  opts.workers = workers;
  std::size_t last_pct = 0;
  opts.progress = [&](std::size_t done, std::size_t total) {
    const std::size_t pct = done * 100 / total;
    if (pct >= last_pct + 10 || done == total) {
      last_pct = pct;
      std::cerr << "  " << done << "/" << total << " runs\n";
    }
  };
  const auto report = run_sweep(grid, opts);

  {
    auto csv = open_out(out_dir / "report.csv");
    write_report_csv(csv, report);
  }
  {
    auto js = open_out(out_dir / "report.json");
    js << report_to_json(report).dump(2) << '\n';
  }
  if (charts) write_charts(report, out_dir / "charts");
  std::set<double> durations(grid.durations.begin(), grid.durations.end());
  for (double t : durations) std::cout << format_table(report, t) << '\n';
  std::cerr << "sweep finished in " << num(report.wall_seconds, "%.1f") << " s\n";

  if (!report.failures.empty()) {
    auto manifest = open_out(out_dir / "failures.json");
    manifest << nlohmann::json(report.failures).dump(2) << '\n';
    for (const auto& f : report.failures) std::cerr << "failed: " << f << '\n';
    return kExitPartialSweep;
  }
  return 0;
}

int do_qmax(long long n) {
  if (n < 2) throw Error(ErrorKind::BadShape, "qmax needs n >= 2, got " + std::to_string(n));
  std::cout << num(q_max(static_cast<std::size_t>(n))) << '\n';
  return 0;
}

int do_report(const fs::path& input, const std::string& out_dir, std::optional<double> duration) {
  std::ifstream in(input);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + input.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::MalformedRecord, input.string() + ": " + e.what());
  }
  const auto report = report_from_json(j);
  std::set<double> durations;
  for (const auto& c : report.cells) durations.insert(c.duration);
  if (duration) {
    if (!durations.count(*duration))
      throw Error(ErrorKind::MissingCell, "report has no duration " + num(*duration, "%g"));
    durations = {*duration};
  }
  for (double t : durations) std::cout << format_table(report, t) << '\n';
  for (const auto& f : report.convergence)
    std::cout << "convergence " << f.config << " n=" << f.n << ": " << (f.converged ? "converged" : "not-converged")
              << " dh=" << num(f.dh, "%.4f") << " dq=" << num(f.dq, "%.4f") << '\n';
  if (!out_dir.empty()) write_charts(report, out_dir);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Statistical complexity of simulated and traced message-passing systems"};
  app.require_subcommand(1);

  std::string config_path, out_path, trace_path;
  std::uint64_t seed = 0;
  auto* sim = app.add_subcommand("simulate", "Run one simulation and write its count matrix");
  sim->add_option("-c,--config", config_path, "Topology config file")->required();
  auto* seed_opt = sim->add_option("-s,--seed", seed, "Override the config seed");
  sim->add_option("-o,--out", out_path, "Count matrix CSV (metadata goes to <stem>.meta.json)")->required();
  sim->add_option("--trace", trace_path, "Also write every send as event JSONL");

  std::string input_path, format = "csv", window;
  std::string analyze_out;
  auto* ana = app.add_subcommand("analyze", "Compute H, Q and SCM of a count file");
  ana->add_option("-i,--input", input_path, "Matrix CSV, edge-count CSV or event JSONL")->required();
  ana->add_option("-o,--out", analyze_out, "Output file (stdout when omitted)");
  ana->add_option("-f,--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  ana->add_option("--window", window, "Event time window T0,T1 (JSONL input only)");

  std::string grid_path, sweep_dir;
  std::size_t workers = default_workers();
  bool no_charts = false;
  auto* swp = app.add_subcommand("sweep", "Run a configuration x size x duration x seed grid");
  swp->add_option("-g,--grid", grid_path, "Sweep grid config file")->required();
  swp->add_option("-o,--out-dir", sweep_dir, "Output directory")->required();
  swp->add_option("-w,--workers", workers, "Parallel runs")->check(CLI::PositiveNumber);
  swp->add_flag("--no-charts", no_charts, "Skip SVG charts");

  long long qmax_n = 0;
  auto* qm = app.add_subcommand("qmax", "Print the Ordered disequilibrium for n components");
  qm->add_option("n", qmax_n, "Component count")->required();

  std::string report_in, report_dir;
  double report_t = 0.0;
  auto* rep = app.add_subcommand("report", "Print tables and render charts from a sweep report JSON");
  rep->add_option("-i,--input", report_in, "report.json from a sweep")->required();
  rep->add_option("-o,--out-dir", report_dir, "Write SVG charts here");
  auto* rep_t = rep->add_option("-t,--duration", report_t, "Only this duration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*sim) return do_simulate(config_path, *seed_opt ? std::optional(seed) : std::nullopt, out_path, trace_path);
    if (*ana) return do_analyze(input_path, analyze_out, format, window);
    if (*swp) return do_sweep(grid_path, sweep_dir, workers, !no_charts);
    if (*qm) return do_qmax(qmax_n);
    if (*rep) return do_report(report_in, report_dir, *rep_t ? std::optional(report_t) : std::nullopt);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::Io ? kExitIo : kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return 0;
}
