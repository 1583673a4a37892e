#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "scmnet/error.hpp"
#include "scmnet/experiments.hpp"
#include "scmnet/ingest.hpp"
#include "scmnet/scm.hpp"
#include "scmnet/sim.hpp"

namespace py = pybind11;
using namespace scmnet;

namespace {

CountMatrix from_array(py::array_t<std::int64_t, py::array::c_style | py::array::forcecast> a) {
  if (a.ndim() != 2 || a.shape(0) != a.shape(1))
    throw Error(ErrorKind::BadShape, "count matrix must be a square 2-D array");
  const auto n = static_cast<std::size_t>(a.shape(0));
  std::vector<std::uint64_t> data(n * n);
  auto view = a.unchecked<2>();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const auto v = view(static_cast<py::ssize_t>(i), static_cast<py::ssize_t>(j));
      if (v < 0) throw Error(ErrorKind::BadShape, "negative count");
      data[i * n + j] = static_cast<std::uint64_t>(v);
    }
  return CountMatrix(n, std::move(data));
}

py::array_t<std::uint64_t> to_array(const CountMatrix& m) {
  const auto n = static_cast<py::ssize_t>(m.size());
  py::array_t<std::uint64_t> out({n, n});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

TopologyConfig make_config(const std::string& variant, std::size_t n, double duration, std::uint64_t seed,
                           std::size_t layers, const std::string& bridge_mode, std::vector<std::size_t> targets,
                           double gen_rate, std::uint32_t hop_limit, double latency) {
  TopologyConfig cfg;
  cfg.n = n;
  cfg.duration = duration;
  cfg.seed = seed;
  cfg.gen_rate = gen_rate;
  cfg.hop_limit = hop_limit;
  cfg.latency = latency;
  if (variant == "ordered") {
    cfg.variant = Ordered{};
  } else if (variant == "chaotic") {
    cfg.variant = Chaotic{};
  } else if (variant == "layered") {
    if (bridge_mode != "pure" && bridge_mode != "mixed")
      throw Error(ErrorKind::BadConfig, "'bridge_mode' must be pure or mixed");
    cfg.variant = Layered{layers, 0.01, bridge_mode == "pure" ? BridgeMode::Pure : BridgeMode::Mixed};
  } else if (variant == "p2p") {
    cfg.variant = P2P{std::move(targets)};
  } else {
    throw Error(ErrorKind::BadConfig, "'variant' must be ordered|chaotic|layered|p2p");
  }
  cfg.label = variant;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_scmnet, m) {
  m.doc() = "Statistical complexity of message-passing systems";

  static py::exception<Error> error(m, "ScmError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(error.ptr(), e.what());
    }
  });

  py::class_<ScmResult>(m, "ScmResult")
      .def_readonly("h_raw", &ScmResult::h_raw)
      .def_readonly("q_raw", &ScmResult::q_raw)
      .def_readonly("h_norm", &ScmResult::h_norm)
      .def_readonly("q_norm", &ScmResult::q_norm)
      .def_readonly("scm_raw", &ScmResult::scm_raw)
      .def_readonly("scm_hq", &ScmResult::scm_hq)
      .def_property_readonly("per_component", [](const ScmResult& r) {
        std::vector<std::tuple<double, double, bool>> out;
        for (const auto& c : r.per_component) out.emplace_back(c.entropy, c.jsd, c.active);
        return out;
      })
      .def("__repr__", [](const ScmResult& r) {
        return "ScmResult(h_norm=" + std::to_string(r.h_norm) + ", q_norm=" + std::to_string(r.q_norm) +
               ", scm_hq=" + std::to_string(r.scm_hq) + ")";
      });

  m.def("analyze", [](py::array counts) { return analyze(from_array(counts)); }, py::arg("counts"),
        "H, Q and SCM of an n x n sent-message count matrix.");
  m.def("jsd", [](std::vector<double> p, std::vector<double> r) { return jsd(p, r); }, py::arg("p"), py::arg("r"));
  m.def("kl_divergence", [](std::vector<double> p, std::vector<double> q) { return kl_divergence(p, q); },
        py::arg("p"), py::arg("m"));
  m.def("q_max", &q_max, py::arg("n"));
  m.def("dimension_axis", &dimension_axis, py::arg("label"));

  m.def("normalize_set",
        [](const std::vector<std::pair<std::string, double>>& scm_hq) {
          std::vector<std::pair<std::string, ScmResult>> in;
          for (const auto& [label, v] : scm_hq) {
            ScmResult r;
            r.scm_hq = v;
            in.emplace_back(label, r);
          }
          std::vector<std::pair<std::string, double>> out;
          for (const auto& e : normalize_set(std::move(in)).entries) out.emplace_back(e.label, e.scm_bar);
          return out;
        },
        py::arg("scm_hq"), "Divide each scm_hq by the set maximum.");

  m.def("simulate",
        [](const std::string& variant, std::size_t n, double duration, std::uint64_t seed, std::size_t layers,
           const std::string& bridge_mode, std::vector<std::size_t> targets, double gen_rate,
           std::uint32_t hop_limit, double latency) {
          const auto cfg =
              make_config(variant, n, duration, seed, layers, bridge_mode, std::move(targets), gen_rate, hop_limit, latency);
          CountMatrix counts;
          {
            py::gil_scoped_release release;
            counts = run(cfg);
          }
          return to_array(counts);
        },
        py::arg("variant"), py::arg("n"), py::arg("duration"), py::arg("seed") = 1, py::arg("layers") = 2,
        py::arg("bridge_mode") = "mixed", py::arg("targets") = std::vector<std::size_t>{},
        py::arg("gen_rate") = TopologyConfig{}.gen_rate, py::arg("hop_limit") = TopologyConfig{}.hop_limit,
        py::arg("latency") = TopologyConfig{}.latency,
        "Run one simulation and return its count matrix as a numpy array.");

  m.def("parse_counts",
        [](const std::string& text) {
          std::istringstream in(text);
          const auto mtx = parse_counts(in);
          return py::make_tuple(to_array(mtx), mtx.labels);
        },
        py::arg("text"), "Parse edge-count CSV text; returns (matrix, ids).");
}
