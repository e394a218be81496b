#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <sstream>

#include "quidd/circuits.hpp"
#include "quidd/cli.hpp"
#include "quidd/errors.hpp"
#include "quidd/grover.hpp"
#include "quidd/persistence.hpp"

namespace py = pybind11;
using namespace quidd;

namespace {

// A state keeps its manager alive; the handle is declared last so it is
// released first.
struct State {
  std::shared_ptr<Manager> manager;
  QuiddVector vector;
};

std::shared_ptr<Manager> make_manager(unsigned bits, double epsilon) {
  PrecisionConfig c;
  c.mantissa_bits = bits;
  c.merge_epsilon = epsilon;
  return std::make_shared<Manager>(c);
}

py::array_t<std::complex<double>> to_array(const std::vector<std::complex<double>>& v) {
  py::array_t<std::complex<double>> a(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), a.mutable_data());
  return a;
}

py::dict stats_dict(const NodeStats& s) {
  py::dict d;
  d["internal"] = s.internal_count;
  d["terminals"] = s.terminal_count;
  d["total"] = s.total;
  return d;
}

State simulate(const std::string& text, unsigned bits, double epsilon) {
  const Circuit c = parse_circuit(text);
  auto m = make_manager(bits, epsilon);
  QuiddVector v = run(*m, c);
  return {m, std::move(v)};
}

py::dict grover(const std::string& pattern, std::optional<std::uint64_t> iterations,
                std::optional<double> time_budget, unsigned bits, double epsilon) {
  const OraclePattern p(pattern);
  GroverOptions o;
  o.iterations = iterations;
  o.time_budget_secs = time_budget;
  auto m = make_manager(bits, epsilon);
  GroverTrace t;
  {
    py::gil_scoped_release release;
    t = run_grover(*m, p, o);
  }
  py::list records;
  for (const GroverRecord& r : t.records) {
    py::dict d;
    d["iteration"] = r.iteration;
    d["success_probability"] = r.success_probability;
    d["state_nodes"] = r.state_nodes;
    d["readout_terminals"] = r.readout_terminals;
    d["elapsed_ms"] = r.elapsed_ms;
    records.append(d);
  }
  py::dict out;
  out["iterations"] = t.iterations_run;
  out["peak_iteration"] = t.peak_iteration();
  out["peak_state_nodes"] = t.peak_state_nodes;
  out["records"] = records;
  out["total_ms"] = t.total_ms;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Quantum information decision diagrams";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<DimensionMismatch>(m, "DimensionMismatch", base.ptr());
  py::register_exception<ResourceLimit>(m, "ResourceLimit", base.ptr());

  py::class_<State>(m, "State")
      .def_property_readonly("qubits", [](const State& s) { return s.vector.qubits; })
      .def("to_numpy", [](const State& s) {
        if (s.vector.qubits > kDenseSimulationCap + 6) throw DimensionMismatch("state too wide to expand");
        return to_array(to_dense(s.vector));
      })
      .def("node_stats", [](const State& s) { return stats_dict(stats(s.vector)); })
      .def("norm", [](const State& s) { return norm_squared(s.vector).to_double(); })
      .def(
          "top",
          [](const State& s, std::size_t k) {
            py::list out;
            for (const cli::Amplitude& a : cli::top_amplitudes(s.vector, k))
              out.append(py::make_tuple(a.bits, a.value, a.probability));
            return out;
          },
          py::arg("k") = 8, "(bits, amplitude, probability), largest first");

  m.def("simulate", &simulate, py::arg("text"), py::arg("precision_bits") = kDefaultMantissaBits,
        py::arg("epsilon") = kDefaultMergeEpsilon, "Parse and run a circuit on decision diagrams.");
  m.def(
      "dense_simulate",
      [](const std::string& text) { return to_array(dense_simulate(parse_circuit(text))); },
      py::arg("text"));
  m.def("iterations_for", &iterations_for, py::arg("data_qubits"), py::arg("solutions") = 1);
  m.def("grover", &grover, py::arg("pattern"), py::arg("iterations") = py::none(),
        py::arg("time_budget") = py::none(), py::arg("precision_bits") = kDefaultMantissaBits,
        py::arg("epsilon") = kDefaultMergeEpsilon);
  m.def(
      "operator_sizes",
      [](std::uint32_t n) {
        const OperatorSizes s = operator_sizes(n);
        return py::make_tuple(s.initial_hadamards, s.repeated_hadamards, s.phase_shift,
                              s.oracle_all_ones, s.oracle_mod_1024);
      },
      py::arg("total_qubits"));
  m.def(
      "qft_nodes",
      [](std::uint32_t n) {
        Manager mgr;
        return stats_dict(stats(build_inverse_qft(mgr, n)));
      },
      py::arg("qubits"));

  m.def(
      "classify",
      [](const std::string& set, bool force_float) {
        return persist::classify_and_describe(persist::parse_set(set, force_float));
      },
      py::arg("set"), py::arg("force_float") = false);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args, const std::string& stdin_text) {
        std::ostringstream out, err;
        std::istringstream in(stdin_text);
        const int code = cli::run_cli(args, out, err, in);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), py::arg("stdin") = "");
}
