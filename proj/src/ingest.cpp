#include "scmnet/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <unordered_map>

#include "scmnet/error.hpp"

namespace scmnet {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string_view rest(line);
  while (true) {
    const auto comma = rest.find(',');
    out.push_back(trim(rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

std::string at_line(std::size_t line) { return "line " + std::to_string(line); }

[[noreturn]] void malformed(std::size_t line, const std::string& why) {
  throw Error(ErrorKind::MalformedRecord, at_line(line) + ": " + why);
}

bool parse_uint(const std::string& s, std::uint64_t& out) {
  if (s.empty()) return false;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

class Interner {
 public:
  explicit Interner(const std::vector<std::string>& preset) {
    for (const auto& id : preset) intern(id);
  }

  std::size_t intern(const std::string& id) {
    auto [it, inserted] = index_.emplace(id, ids_.size());
    if (inserted) ids_.push_back(id);
    return it->second;
  }

  std::size_t size() const { return ids_.size(); }
  std::vector<std::string> take() { return std::move(ids_); }

 private:
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::string> ids_;
};

struct Edge {
  std::size_t src;
  std::size_t dst;
  std::uint64_t count;
};

CountMatrix assemble(Interner& ids, const std::vector<Edge>& edges) {
  const std::size_t n = ids.size();
  if (n < 2) throw Error(ErrorKind::BadShape, "fewer than two distinct component ids");
  CountMatrix m(n);
  for (const auto& e : edges) m(e.src, e.dst) += e.count;
  m.labels = ids.take();
  return m;
}

std::string id_field(const nlohmann::json& obj, const char* key, std::size_t line) {
  const auto it = obj.find(key);
  if (it == obj.end()) malformed(line, std::string("missing key '") + key + "'");
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<long long>());
  malformed(line, std::string("key '") + key + "' must be a string");
}

}  // namespace

CountMatrix parse_counts(std::istream& in, const std::vector<std::string>& preset_ids) {
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  Interner ids(preset_ids);
  std::vector<Edge> edges;

  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (!header) {
      if (fields != std::vector<std::string>{"src", "dst", "count"})
        malformed(lineno, "expected header 'src,dst,count'");
      header = true;
      continue;
    }
    if (fields.size() != 3) malformed(lineno, "expected 3 fields, got " + std::to_string(fields.size()));
    if (fields[0].empty() || fields[1].empty()) malformed(lineno, "empty component id");
    std::uint64_t count = 0;
    if (!parse_uint(fields[2], count) || count < 1)
      malformed(lineno, "count must be an integer >= 1, got '" + fields[2] + "'");
    if (fields[0] == fields[1])
      throw Error(ErrorKind::SelfLoop, at_line(lineno) + ": component '" + fields[0] + "' sends to itself");
    const std::size_t s = ids.intern(fields[0]);
    const std::size_t d = ids.intern(fields[1]);
    edges.push_back({s, d, count});
  }
  if (!header) throw Error(ErrorKind::EmptyInput, "no header");
  if (edges.empty()) throw Error(ErrorKind::EmptyInput, "no records");
  return assemble(ids, edges);
}

CountMatrix parse_events(std::istream& in, std::optional<TimeWindow> window,
                         const std::vector<std::string>& preset_ids) {
  if (window) {
    if (!(window->begin >= 0.0) || window->end < window->begin)
      throw Error(ErrorKind::BadConfig, "window must satisfy 0 <= begin <= end");
    if (window->end == window->begin) throw Error(ErrorKind::EmptyWindow, "window has zero length");
  }

  std::string line;
  std::size_t lineno = 0;
  std::size_t records = 0;
  Interner ids(preset_ids);
  std::vector<Edge> edges;
  double first_ts = std::numeric_limits<double>::infinity();
  double last_ts = -std::numeric_limits<double>::infinity();

  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      malformed(lineno, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) malformed(lineno, "expected a JSON object");
    const auto ts_it = obj.find("ts");
    if (ts_it == obj.end() || !ts_it->is_number()) malformed(lineno, "'ts' must be a number");
    const double ts = ts_it->get<double>();
    if (!(ts >= 0.0) || !std::isfinite(ts)) malformed(lineno, "'ts' must be non-negative");
    const std::string src = id_field(obj, "src", lineno);
    const std::string dst = id_field(obj, "dst", lineno);
    if (src == dst)
      throw Error(ErrorKind::SelfLoop, at_line(lineno) + ": component '" + src + "' sends to itself");
    ++records;
    if (window && (ts < window->begin || ts >= window->end)) continue;
    first_ts = std::min(first_ts, ts);
    last_ts = std::max(last_ts, ts);
    const std::size_t s = ids.intern(src);
    const std::size_t d = ids.intern(dst);
    edges.push_back({s, d, 1});
  }
  if (records == 0) throw Error(ErrorKind::EmptyInput, "no events");
  if (edges.empty()) throw Error(ErrorKind::EmptyWindow, "no events fall inside the window");

  CountMatrix m = assemble(ids, edges);
  m.meta.duration = window ? window->end - window->begin : last_ts - first_ts;
  return m;
}

CountMatrix read_matrix_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> labels;
  std::vector<std::uint64_t> data;
  std::size_t rows = 0;

  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto fields = split_csv(line);
    if (labels.empty()) {
      labels = std::move(fields);
      for (const auto& l : labels)
        if (l.empty()) malformed(lineno, "empty component label");
      continue;
    }
    if (fields.size() != labels.size())
      malformed(lineno, "expected " + std::to_string(labels.size()) + " values, got " +
                            std::to_string(fields.size()));
    for (std::size_t j = 0; j < fields.size(); ++j) {
      std::uint64_t v = 0;
      if (!parse_uint(fields[j], v)) malformed(lineno, "not a non-negative integer: '" + fields[j] + "'");
      if (j == rows && v != 0) throw Error(ErrorKind::SelfLoop, at_line(lineno) + ": nonzero diagonal");
      data.push_back(v);
    }
    ++rows;
  }
  if (labels.empty()) throw Error(ErrorKind::EmptyInput, "no header");
  if (rows != labels.size())
    throw Error(ErrorKind::MalformedRecord, "expected " + std::to_string(labels.size()) +
                                                " matrix rows, got " + std::to_string(rows));
  CountMatrix m(labels.size(), std::move(data));
  m.labels = std::move(labels);
  return m;
}

void write_matrix_csv(std::ostream& out, const CountMatrix& counts) {
  const auto labels = counts.effective_labels();
  for (std::size_t j = 0; j < labels.size(); ++j) out << (j ? "," : "") << labels[j];
  out << '\n';
  const std::size_t n = counts.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out << (j ? "," : "") << counts(i, j);
    out << '\n';
  }
}

void write_event_jsonl(std::ostream& out, double ts, const std::string& src, const std::string& dst) {
  nlohmann::json j = {{"ts", ts}, {"src", src}, {"dst", dst}};
  out << j.dump() << '\n';
}

nlohmann::json meta_json(const CountMatrix& counts) {
  return {{"n", counts.size()},
          {"label", counts.meta.label},
          {"duration", counts.meta.duration},
          {"seed", counts.meta.seed},
          {"config", counts.meta.config},
          {"total", counts.total()}};
}

CountFormat detect_format(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::string line;
  while (std::getline(in, line)) {
    const auto t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '{') return CountFormat::EventJsonl;
    if (split_csv(t) == std::vector<std::string>{"src", "dst", "count"}) return CountFormat::EdgeCsv;
    return CountFormat::MatrixCsv;
  }
  throw Error(ErrorKind::EmptyInput, path.string() + " is empty");
}

CountMatrix load_counts(const std::filesystem::path& path, std::optional<TimeWindow> window) {
  const auto format = detect_format(path);
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  CountMatrix m;
  switch (format) {
    case CountFormat::EdgeCsv: m = parse_counts(in); break;
    case CountFormat::EventJsonl: m = parse_events(in, window); break;
    case CountFormat::MatrixCsv: m = read_matrix_csv(in); break;
  }
  if (m.meta.label.empty()) m.meta.label = path.stem().string();
  return m;
}

}  // namespace scmnet
