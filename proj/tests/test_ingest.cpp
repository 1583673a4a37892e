#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "scmnet/error.hpp"
#include "scmnet/ingest.hpp"
#include "scmnet/sim.hpp"

using namespace scmnet;

namespace {

ErrorKind kind_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::Io;
}

CountMatrix counts_from(const std::string& text, const std::vector<std::string>& preset = {}) {
  std::istringstream in(text);
  return parse_counts(in, preset);
}

CountMatrix events_from(const std::string& text, std::optional<TimeWindow> w = std::nullopt,
                        const std::vector<std::string>& preset = {}) {
  std::istringstream in(text);
  return parse_events(in, w, preset);
}

}  // namespace

TEST_CASE("parse_counts") {
  SUBCASE("accumulates into first-appearance order") {
    const auto m = counts_from("src,dst,count\nA,B,2\nA,C,1\nA,D,1\n");
    CHECK(m.size() == 4);
    CHECK(m.labels == std::vector<std::string>{"A", "B", "C", "D"});
    CHECK(m(0, 1) == 2);
    CHECK(m(0, 2) == 1);
    CHECK(m(0, 3) == 1);
    CHECK(m.row_sum(1) == 0);
  }
  SUBCASE("duplicate edges are summed") {
    const auto m = counts_from("src,dst,count\r\nA,B,2\r\nA,B,3\r\n\r\n");
    CHECK(m(0, 1) == 5);
  }
  SUBCASE("self loop is rejected with location") {
    try {
      counts_from("src,dst,count\nA,B,1\nA,A,1\n");
      FAIL("expected SelfLoop");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::SelfLoop);
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
  }
  SUBCASE("malformed records report the line") {
    try {
      counts_from("src,dst,count\nA,B,1\nA,C\n");
      FAIL("expected MalformedRecord");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::MalformedRecord);
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    CHECK(kind_of([] { counts_from("src,dst,count\nA,B,0\n"); }) == ErrorKind::MalformedRecord);
    CHECK(kind_of([] { counts_from("src,dst,count\nA,B,-1\n"); }) == ErrorKind::MalformedRecord);
    CHECK(kind_of([] { counts_from("from,to,n\nA,B,1\n"); }) == ErrorKind::MalformedRecord);
  }
  SUBCASE("empty input") {
    CHECK(kind_of([] { counts_from(""); }) == ErrorKind::EmptyInput);
    CHECK(kind_of([] { counts_from("src,dst,count\n"); }) == ErrorKind::EmptyInput);
  }
  SUBCASE("preset ids come first") {
    const auto m = counts_from("src,dst,count\nB,A,4\n", {"A", "B", "Z"});
    CHECK(m.size() == 3);
    CHECK(m(1, 0) == 4);
  }
}

TEST_CASE("parse_counts: record order independence") {
  std::vector<std::string> records{"A,B,2", "C,A,1", "B,D,7", "D,C,3", "A,D,1", "C,B,5"};
  const auto base = counts_from("src,dst,count\n" + [&] {
    std::string s;
    for (const auto& r : records) s += r + "\n";
    return s;
  }());
  std::mt19937 rng(3);
  for (int i = 0; i < 20; ++i) {
    std::shuffle(records.begin(), records.end(), rng);
    std::string s = "src,dst,count\n";
    for (const auto& r : records) s += r + "\n";
    CHECK(counts_from(s, base.labels) == base);
  }
}

TEST_CASE("parse_events") {
  const std::string trace =
      R"({"ts": 0.5, "src": "a", "dst": "b"}
{"ts": 1.0, "src": "b", "dst": "c"}
{"ts": 1.5, "src": "a", "dst": "c"}
{"ts": 7.0, "src": "c", "dst": "a"}
{"ts": 9.0, "src": "c", "dst": "b"}
)";
  SUBCASE("window counts only the events inside") {
    const auto m = events_from(trace, TimeWindow{0.0, 2.0});
    CHECK(m.total() == 3);
    CHECK(m.size() == 3);
    CHECK(m.meta.duration == 2.0);
  }
  SUBCASE("no window counts everything; duration is the span") {
    const auto m = events_from(trace);
    CHECK(m.total() == 5);
    CHECK(m.meta.duration == 8.5);
  }
  SUBCASE("window errors") {
    CHECK(kind_of([&] { events_from(trace, TimeWindow{0.0, 0.0}); }) == ErrorKind::EmptyWindow);
    CHECK(kind_of([&] { events_from(trace, TimeWindow{20.0, 30.0}); }) == ErrorKind::EmptyWindow);
    CHECK(kind_of([&] { events_from(trace, TimeWindow{3.0, 1.0}); }) == ErrorKind::BadConfig);
  }
  SUBCASE("record errors") {
    CHECK(kind_of([] { events_from(R"({"ts": 1, "src": "a", "dst": "a"})"); }) == ErrorKind::SelfLoop);
    CHECK(kind_of([] { events_from(R"({"ts": -1, "src": "a", "dst": "b"})"); }) == ErrorKind::MalformedRecord);
    CHECK(kind_of([] { events_from(R"({"src": "a", "dst": "b"})"); }) == ErrorKind::MalformedRecord);
    CHECK(kind_of([] { events_from("{not json\n"); }) == ErrorKind::MalformedRecord);
    CHECK(kind_of([] { events_from("\n\n"); }) == ErrorKind::EmptyInput);
  }
}

TEST_CASE("matrix CSV round trip of simulator output") {
  for (const Variant& v : {Variant{Chaotic{}}, Variant{Layered{4}}, Variant{Ordered{}}}) {
    TopologyConfig c;
    c.variant = v;
    c.n = 24;
    c.duration = 30;
    c.seed = 5;
    const auto m = run(c);
    std::ostringstream out;
    write_matrix_csv(out, m);
    std::istringstream in(out.str());
    const auto back = read_matrix_csv(in);
    CHECK(back == m);
    std::ostringstream again;
    write_matrix_csv(again, back);
    CHECK(again.str() == out.str());
  }
}

TEST_CASE("matrix CSV errors") {
  auto read = [](const std::string& s) {
    std::istringstream in(s);
    return read_matrix_csv(in);
  };
  CHECK(kind_of([&] { read("a,b\n0,1\n"); }) == ErrorKind::MalformedRecord);
  CHECK(kind_of([&] { read("a,b\n0,1\n2\n"); }) == ErrorKind::MalformedRecord);
  CHECK(kind_of([&] { read("a,b\n1,1\n2,0\n"); }) == ErrorKind::SelfLoop);
  CHECK(kind_of([&] { read("a,b\n0,x\n2,0\n"); }) == ErrorKind::MalformedRecord);
  CHECK(kind_of([&] { read(""); }) == ErrorKind::EmptyInput);
}

TEST_CASE("event trace of a Chaotic run re-ingests to the same matrix") {
  TopologyConfig c;
  c.variant = Chaotic{};
  c.n = 32;
  c.duration = 20;
  c.seed = 17;
  std::ostringstream trace;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < c.n; ++i) labels.push_back("c" + std::to_string(i));
  const auto direct = run(c, nullptr, [&](const SendEvent& e) { write_event_jsonl(trace, e.time, labels[e.src], labels[e.dst]); });

  const auto back = events_from(trace.str(), std::nullopt, labels);
  CHECK(back == direct);
  std::ostringstream a, b;
  write_matrix_csv(a, direct);
  write_matrix_csv(b, back);
  CHECK(a.str() == b.str());
}

TEST_CASE("meta_json") {
  CountMatrix m(3);
  m(0, 1) = 4;
  m.meta.label = "x";
  m.meta.seed = 9;
  const auto j = meta_json(m);
  CHECK(j["n"] == 3);
  CHECK(j["total"] == 4);
  CHECK(j["seed"] == 9);
}
