#include "scmnet/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "scmnet/error.hpp"

namespace scmnet {

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string cell_name(const std::string& config, std::size_t n, double t) {
  return config + " n=" + std::to_string(n) + " t=" + fmt("%g", t);
}

struct Moments {
  double mean = 0.0;
  double sd = 0.0;
};

Moments moments(const std::vector<double>& xs) {
  Moments m;
  if (xs.empty()) return m;
  for (double x : xs) m.mean += x;
  m.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return m;
}

}  // namespace

const std::vector<std::string>& known_labels() {
  static const std::vector<std::string> labels{"Or", "L64", "L32", "L16", "L8", "L4", "L2", "Ch"};
  return labels;
}

std::size_t dimension_axis(const std::string& label) {
  const auto& labels = known_labels();
  const auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) throw Error(ErrorKind::UnknownLabel, "unknown configuration '" + label + "'");
  return std::size_t{1} << static_cast<std::size_t>(it - labels.begin());
}

void SweepGrid::validate() const {
  auto bad = [](const std::string& key, const std::string& why) {
    throw Error(ErrorKind::BadConfig, "'" + key + "' " + why);
  };
  if (sizes.empty()) bad("sizes", "must not be empty");
  if (durations.empty()) bad("durations", "must not be empty");
  if (configs.empty()) bad("configs", "must not be empty");
  if (seeds.empty()) bad("seeds", "must not be empty");
  for (const auto& c : configs) {
    try {
      dimension_axis(c);
    } catch (const Error&) {
      bad("configs", "contains unknown label '" + c + "'");
    }
  }
  for (double t : durations)
    if (!(t > 0.0)) bad("durations", "must be positive");
  for (std::size_t n : sizes)
    if (n < 3) bad("sizes", "must be >= 3");
  if (!(gen_rate > 0.0)) bad("gen_rate", "must be > 0");
  if (!(latency >= 0.0)) bad("latency", "must be >= 0");
}

TopologyConfig make_topology(const SweepGrid& grid, const std::string& label, std::size_t n,
                             double duration, std::uint64_t seed) {
  TopologyConfig cfg;
  cfg.n = n;
  cfg.duration = duration;
  cfg.seed = seed;
  cfg.gen_rate = grid.gen_rate;
  cfg.hop_limit = grid.hop_limit;
  cfg.latency = grid.latency;
  cfg.label = label;
  if (label == "Or") {
    cfg.variant = Ordered{};
  } else if (label == "Ch") {
    cfg.variant = Chaotic{};
  } else {
    dimension_axis(label);
    cfg.variant = Layered{std::stoul(label.substr(1)), grid.bridge_fraction, grid.bridge_mode};
  }
  return cfg;
}

const CellStats* SweepReport::find(const std::string& config, std::size_t n, double duration) const {
  for (const auto& c : cells)
    if (c.config == config && c.n == n && c.duration == duration) return &c;
  return nullptr;
}

const CellStats& SweepReport::at(const std::string& config, std::size_t n, double duration) const {
  if (const auto* c = find(config, n, duration)) return *c;
  throw Error(ErrorKind::MissingCell, cell_name(config, n, duration));
}

SweepReport run_sweep(const SweepGrid& grid, const SweepOptions& options) {
  grid.validate();
  const auto started = std::chrono::steady_clock::now();

  struct Job {
    std::size_t cell;
    std::uint64_t seed;
    std::optional<ScmResult> result;
    std::string error;
  };

  SweepReport report;
  std::vector<Job> jobs;
  jobs.reserve(grid.run_count());
  for (const auto& config : grid.configs)
    for (std::size_t n : grid.sizes)
      for (double t : grid.durations) {
        CellStats cell;
        cell.config = config;
        cell.n = n;
        cell.duration = t;
        report.cells.push_back(cell);
        for (std::uint64_t seed : grid.seeds) jobs.push_back({report.cells.size() - 1, seed, {}, {}});
      }

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      auto& job = jobs[i];
      const auto& cell = report.cells[job.cell];
      try {
        const auto cfg = make_topology(grid, cell.config, cell.n, cell.duration, job.seed);
        job.result = analyze(run(cfg));
      } catch (const std::exception& e) {
        job.error = e.what();
      }
      const std::size_t d = ++done;
      if (options.progress) {
        std::lock_guard lock(progress_mutex);
        options.progress(d, jobs.size());
      }
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(options.workers, 1, std::max<std::size_t>(1, jobs.size()));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  std::vector<std::vector<const Job*>> by_cell(report.cells.size());
  for (const auto& job : jobs) by_cell[job.cell].push_back(&job);

  for (std::size_t c = 0; c < report.cells.size(); ++c) {
    auto& cell = report.cells[c];
    std::vector<double> h, q, s;
    for (const Job* job : by_cell[c]) {
      if (!job->result) {
        cell.failed = true;
        if (cell.error.empty()) cell.error = job->error;
        report.failures.push_back(cell_name(cell.config, cell.n, cell.duration) +
                                  " seed=" + std::to_string(job->seed) + ": " + job->error);
        continue;
      }
      h.push_back(job->result->h_norm);
      q.push_back(job->result->q_norm);
      s.push_back(job->result->scm_hq);
    }
    if (cell.failed) continue;
    cell.runs = h.size();
    const auto mh = moments(h), mq = moments(q), ms = moments(s);
    cell.h_mean = mh.mean;
    cell.h_sd = mh.sd;
    cell.q_mean = mq.mean;
    cell.q_sd = mq.sd;
    cell.scm_mean = ms.mean;
    cell.scm_sd = ms.sd;
  }

  finalize_report(report);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

void finalize_report(SweepReport& report) {
  std::set<std::pair<std::size_t, double>> groups;
  for (const auto& c : report.cells) groups.insert({c.n, c.duration});

  for (const auto& [n, t] : groups) {
    std::vector<std::pair<std::string, ScmResult>> entries;
    std::vector<CellStats*> members;
    for (auto& c : report.cells) {
      if (c.n != n || c.duration != t || c.failed) continue;
      ScmResult r;
      r.h_norm = c.h_mean;
      r.q_norm = c.q_mean;
      r.scm_hq = c.scm_mean;
      entries.emplace_back(c.config, r);
      members.push_back(&c);
    }
    try {
      const auto set = normalize_set(std::move(entries));
      for (std::size_t i = 0; i < members.size(); ++i) members[i]->scm_bar = set.entries[i].scm_bar;
    } catch (const Error& e) {
      report.failures.push_back("group n=" + std::to_string(n) + " t=" + fmt("%g", t) + ": " + e.what());
    }
  }

  report.convergence.clear();
  std::set<std::pair<std::string, std::size_t>> seen;
  for (const auto& c : report.cells) {
    if (!seen.insert({c.config, c.n}).second) continue;
    const auto* a = report.find(c.config, c.n, 200.0);
    const auto* b = report.find(c.config, c.n, 500.0);
    if (!a || !b || a->failed || b->failed) continue;
    const auto v = convergence_check(report, c.n, c.config);
    report.convergence.push_back({c.config, c.n, v.converged, v.dh, v.dq});
  }
}

Verdict convergence_check(const SweepReport& report, std::size_t n, const std::string& config) {
  const auto& early = report.at(config, n, 200.0);
  const auto& late = report.at(config, n, 500.0);
  if (early.failed || late.failed)
    throw Error(ErrorKind::MissingCell, cell_name(config, n, early.failed ? 200.0 : 500.0) + " failed");
  Verdict v;
  v.dh = std::abs(late.h_mean - early.h_mean);
  v.dq = std::abs(late.q_mean - early.q_mean);
  v.converged = v.dh <= kConvergenceTolerance && v.dq <= kConvergenceTolerance;
  return v;
}

void write_report_csv(std::ostream& out, const SweepReport& report) {
  out << "config,dimension,n,duration,runs,h_mean,h_sd,q_mean,q_sd,scm_mean,scm_sd,scm_bar,failed\n";
  for (const auto& c : report.cells) {
    out << c.config << ',' << dimension_axis(c.config) << ',' << c.n << ',' << fmt("%g", c.duration)
        << ',' << c.runs;
    for (double v : {c.h_mean, c.h_sd, c.q_mean, c.q_sd, c.scm_mean, c.scm_sd, c.scm_bar})
      out << ',' << fmt("%.9f", v);
    out << ',' << (c.failed ? 1 : 0) << '\n';
  }
}

nlohmann::json report_to_json(const SweepReport& report) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : report.cells) {
    nlohmann::json j = {{"config", c.config},     {"dimension", dimension_axis(c.config)},
                        {"n", c.n},               {"duration", c.duration},
                        {"runs", c.runs},         {"h_mean", c.h_mean},
                        {"h_sd", c.h_sd},         {"q_mean", c.q_mean},
                        {"q_sd", c.q_sd},         {"scm_mean", c.scm_mean},
                        {"scm_sd", c.scm_sd},     {"scm_bar", c.scm_bar},
                        {"failed", c.failed}};
    if (c.failed) j["error"] = c.error;
    cells.push_back(std::move(j));
  }
  nlohmann::json conv = nlohmann::json::array();
  for (const auto& f : report.convergence)
    conv.push_back({{"config", f.config}, {"n", f.n}, {"converged", f.converged}, {"dh", f.dh}, {"dq", f.dq}});
  return {{"cells", cells}, {"convergence", conv}, {"failures", report.failures}};
}

SweepReport report_from_json(const nlohmann::json& j) {
  SweepReport report;
  try {
    for (const auto& c : j.at("cells")) {
      CellStats s;
      s.config = c.at("config").get<std::string>();
      dimension_axis(s.config);
      s.n = c.at("n").get<std::size_t>();
      s.duration = c.at("duration").get<double>();
      s.runs = c.at("runs").get<std::size_t>();
      s.h_mean = c.at("h_mean").get<double>();
      s.h_sd = c.at("h_sd").get<double>();
      s.q_mean = c.at("q_mean").get<double>();
      s.q_sd = c.at("q_sd").get<double>();
      s.scm_mean = c.at("scm_mean").get<double>();
      s.scm_sd = c.at("scm_sd").get<double>();
      s.scm_bar = c.at("scm_bar").get<double>();
      s.failed = c.at("failed").get<bool>();
      s.error = c.value("error", "");
      report.cells.push_back(std::move(s));
    }
    if (j.contains("failures")) report.failures = j.at("failures").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::MalformedRecord, std::string("sweep report: ") + e.what());
  }
  std::vector<std::string> failures = report.failures;
  report.failures.clear();
  finalize_report(report);
  for (auto& f : failures)
    if (std::find(report.failures.begin(), report.failures.end(), f) == report.failures.end())
      report.failures.push_back(std::move(f));
  return report;
}

std::string format_table(const SweepReport& report, double duration) {
  std::vector<std::size_t> sizes;
  std::vector<std::string> configs;
  for (const auto& c : report.cells) {
    if (c.duration != duration) continue;
    if (std::find(sizes.begin(), sizes.end(), c.n) == sizes.end()) sizes.push_back(c.n);
    if (std::find(configs.begin(), configs.end(), c.config) == configs.end()) configs.push_back(c.config);
  }
  std::sort(sizes.begin(), sizes.end());
  std::sort(configs.begin(), configs.end(),
            [](const auto& a, const auto& b) { return dimension_axis(a) < dimension_axis(b); });

  std::ostringstream os;
  os << "t=" << fmt("%g", duration) << "s\n";
  os << "      ";
  for (std::size_t n : sizes) os << fmt("%-21.0f", static_cast<double>(n));
  os << "\n      ";
  for (std::size_t i = 0; i < sizes.size(); ++i) os << "H      Q      SCM    ";
  os << '\n';
  for (const auto& config : configs) {
    os << config << std::string(config.size() < 6 ? 6 - config.size() : 1, ' ');
    for (std::size_t n : sizes) {
      const auto* c = report.find(config, n, duration);
      if (!c || c->failed) {
        os << "-      -      -      ";
        continue;
      }
      os << fmt("%.3f  ", c->h_mean) << fmt("%.3f  ", c->q_mean) << fmt("%.3f  ", c->scm_bar);
    }
    os << '\n';
  }
  return os.str();
}

std::string render_chart_svg(const SweepReport& report, std::size_t n, double duration) {
  std::vector<const CellStats*> cells;
  for (const auto& c : report.cells)
    if (c.n == n && c.duration == duration && !c.failed) cells.push_back(&c);
  std::sort(cells.begin(), cells.end(), [](const auto* a, const auto* b) {
    return dimension_axis(a->config) < dimension_axis(b->config);
  });

  constexpr double width = 640, height = 420;
  constexpr double left = 60, right = 130, top = 40, bottom = 60;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;
  auto x_of = [&](const std::string& label) {
    return left + plot_w * std::log2(static_cast<double>(dimension_axis(label))) / 7.0;
  };
  auto y_of = [&](double v) { return top + plot_h * (1.0 - std::clamp(v, 0.0, 1.0)); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << left + plot_w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">n="
     << n << ", t=" << fmt("%g", duration) << "s</text>\n";

  // axes and grid
  os << "<g stroke=\"#ccc\" stroke-width=\"1\">\n";
  for (int i = 0; i <= 4; ++i) {
    const double y = y_of(i / 4.0);
    os << "<line x1=\"" << left << "\" y1=\"" << y << "\" x2=\"" << left + plot_w << "\" y2=\"" << y << "\"/>\n";
  }
  os << "</g>\n";
  os << "<g stroke=\"black\" stroke-width=\"1\">\n"
     << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w << "\" y2=\""
     << top + plot_h << "\"/>\n"
     << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + plot_h << "\"/>\n"
     << "</g>\n";
  for (int i = 0; i <= 4; ++i)
    os << "<text x=\"" << left - 8 << "\" y=\"" << y_of(i / 4.0) + 4 << "\" text-anchor=\"end\">"
       << fmt("%.2f", i / 4.0) << "</text>\n";
  for (const auto& label : known_labels()) {
    const double x = x_of(label);
    os << "<text x=\"" << x << "\" y=\"" << top + plot_h + 18 << "\" text-anchor=\"middle\">" << label << "</text>\n";
    os << "<text x=\"" << x << "\" y=\"" << top + plot_h + 32 << "\" text-anchor=\"middle\" fill=\"#666\">"
       << dimension_axis(label) << "</text>\n";
  }
  os << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 8
     << "\" text-anchor=\"middle\">configuration dimension (log2)</text>\n";

  struct Series {
    const char* name;
    const char* color;
    double CellStats::*field;
  };
  const Series series[] = {{"H", "#1f77b4", &CellStats::h_mean},
                           {"Q", "#d62728", &CellStats::q_mean},
                           {"SCM", "#2ca02c", &CellStats::scm_bar}};
  int row = 0;
  for (const auto& s : series) {
    os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < cells.size(); ++i)
      os << (i ? " " : "") << fmt("%.2f", x_of(cells[i]->config)) << ','
         << fmt("%.2f", y_of(cells[i]->*s.field));
    os << "\"/>\n";
    for (const auto* c : cells)
      os << "<circle cx=\"" << fmt("%.2f", x_of(c->config)) << "\" cy=\"" << fmt("%.2f", y_of(c->*s.field))
         << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
    const double ly = top + 10 + 20 * row++;
    os << "<line x1=\"" << width - right + 15 << "\" y1=\"" << ly << "\" x2=\"" << width - right + 40
       << "\" y2=\"" << ly << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << width - right + 46 << "\" y=\"" << ly + 4 << "\">" << s.name << " n=" << n
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace scmnet
