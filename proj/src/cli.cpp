#include "quidd/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <iterator>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "CLI11.hpp"
#include "quidd/circuits.hpp"
#include "quidd/errors.hpp"
#include "quidd/grover.hpp"
#include "quidd/persistence.hpp"

namespace quidd::cli {

namespace {

using Clock = std::chrono::steady_clock;

// Node record plus its unique-table entry.
constexpr std::size_t kNodeBytes = 48;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string format_complex(std::complex<double> z) {
  constexpr double kShown = 5e-11;
  const double re = std::abs(z.real()) < kShown ? 0.0 : z.real();
  const double im = std::abs(z.imag()) < kShown ? 0.0 : z.imag();
  if (im == 0) return fmt("%.10f", re);
  if (re == 0) return fmt("%.10f", im) + "i";
  return fmt("%.10f", re) + (im < 0 ? "-" : "+") + fmt("%.10f", std::abs(im)) + "i";
}

std::string describe_gate(const Gate& g) {
  std::string s = g.name();
  if (g.kind == GateKind::oracle) return s + " " + g.pattern;
  for (const Control& c : g.controls) s += (c.positive ? " " : " !") + std::to_string(c.qubit);
  for (std::uint32_t t : g.targets) s += " " + std::to_string(t);
  return s;
}

std::string read_input(const std::string& path, std::istream& in) {
  if (path == "-") return {std::istreambuf_iterator<char>(in), {}};
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct Globals {
  unsigned precision_bits = kDefaultMantissaBits;
  double epsilon = kDefaultMergeEpsilon;
  std::uint64_t seed = 1;

  PrecisionConfig config() const {
    PrecisionConfig c;
    c.mantissa_bits = precision_bits;
    c.merge_epsilon = epsilon;
    return c;
  }
};

void header(std::ostream& out, const std::string& command, const Globals& g) {
  out << "# quidd " << command << "\n# " << g.config().describe() << "\n";
}

// ---- run ----

struct RunOptions {
  std::string file;
  bool check_dense = false;
  std::size_t top = 8;
  bool steps = false;
};

int cmd_run(const Globals& g, const RunOptions& o, std::ostream& out, std::istream& in) {
  const Circuit c = parse_circuit(read_input(o.file, in));
  validate(c);
  if (o.check_dense && c.width > kDenseSimulationCap)
    throw ResourceLimit("--check-dense needs at most " + std::to_string(kDenseSimulationCap) +
                        " qubits, circuit has " + std::to_string(c.width));

  Manager m(g.config());
  header(out, "run", g);
  out << "circuit: " << o.file << "\nqubits: " << c.width << "\ngates: " << c.gates.size()
      << "\n";

  const auto t0 = Clock::now();
  QuiddVector state = basis_state(m, c.initial_state);
  std::size_t peak = stats(state).total;
  for (std::size_t i = 0; i < c.gates.size(); ++i) {
    state = apply_gate(state, c.gates[i]);
    const NodeStats s = stats(state);
    peak = std::max(peak, s.total);
    if (o.steps)
      out << "step " << i + 1 << ": " << describe_gate(c.gates[i]) << " -> " << s.total
          << " nodes (" << s.terminal_count << " terminals)\n";
  }
  const double elapsed = ms_since(t0);

  const NodeStats fs = stats(state);
  out << "final nodes: " << fs.total << " (internal " << fs.internal_count << ", terminals "
      << fs.terminal_count << ")\n";
  out << "peak state nodes: " << peak << "\n";
  out << "peak live nodes: " << m.peak_nodes() << "\n";
  out << "elapsed_ms: " << fmt("%.3f", elapsed) << "\n";
  out << "norm: " << fmt("%.12f", norm_squared(state).to_double()) << "\n";

  const auto amps = top_amplitudes(state, o.top);
  out << "top amplitudes:\n";
  for (const Amplitude& a : amps)
    out << "  |" << a.bits << ">  " << format_complex(a.value) << "  p=" << fmt("%.10f", a.probability)
        << "\n";

  if (o.check_dense) {
    const DenseState dense = dense_simulate(c);
    const auto ours = to_dense(state);
    double dev = 0;
    for (std::size_t i = 0; i < dense.size(); ++i) dev = std::max(dev, std::abs(dense[i] - ours[i]));
    out << "max deviation from dense: " << fmt("%.3e", dev) << "\n";
  }
  return kExitOk;
}

// ---- grover ----

struct GroverCliOptions {
  std::optional<std::uint32_t> qubits;
  std::string pattern;
  std::string trace;
  std::optional<std::uint64_t> iterations;
  std::optional<double> time_budget;
};

OraclePattern resolve_pattern(const GroverCliOptions& o) {
  if (o.pattern.empty()) {
    if (!o.qubits) throw UsageError("grover needs --qubits or --pattern");
    return OraclePattern(std::string(*o.qubits, '1'));
  }
  if (o.qubits && *o.qubits != o.pattern.size())
    throw UsageError("--pattern has " + std::to_string(o.pattern.size()) + " symbols but --qubits is " +
                     std::to_string(*o.qubits));
  return OraclePattern(o.pattern);
}

int cmd_grover(const Globals& g, const GroverCliOptions& o, std::ostream& out, std::ostream& err) {
  const OraclePattern pattern = resolve_pattern(o);
  GroverOptions go;
  go.iterations = o.iterations;
  go.time_budget_secs = o.time_budget ? o.time_budget : time_budget_from_env();

  std::ofstream file;
  std::ostream* csv = nullptr;
  if (o.trace == "-") {
    csv = &out;
  } else if (!o.trace.empty()) {
    file.open(o.trace, std::ios::binary);
    if (!file) throw InputError("cannot write " + o.trace);
    csv = &file;
  }
  std::ostream& summary = o.trace == "-" ? err : out;

  if (csv) {
    *csv << "iteration,success_probability,state_nodes,elapsed_ms\n";
    go.on_iteration = [csv](const GroverRecord& r) {
      *csv << r.iteration << "," << fmt("%.12f", r.success_probability) << "," << r.state_nodes
           << "," << fmt("%.3f", r.elapsed_ms) << "\n";
      csv->flush();
    };
  }

  Manager m(g.config());
  header(summary, "grover", g);
  const GroverTrace t = run_grover(m, pattern, go);
  const std::uint64_t peak = t.peak_iteration();

  summary << "data qubits: " << pattern.data_qubits() << "\n";
  summary << "pattern: " << pattern.str() << "\n";
  summary << "solutions: " << pattern.solutions() << "\n";
  summary << "iterations: " << t.iterations_run << "\n";
  summary << "peak iteration: " << peak << "\n";
  summary << "peak success probability: " << fmt("%.12f", t.records[peak].success_probability) << "\n";
  summary << "final success probability: "
          << fmt("%.12f", t.records.back().success_probability) << "\n";
  summary << "peak state nodes: " << t.peak_state_nodes << "\n";
  summary << "peak live nodes: " << t.peak_live_nodes << "\n";
  summary << "total_ms: " << fmt("%.3f", t.total_ms) << "\n";
  return kExitOk;
}

// ---- qft ----

int cmd_qft(const Globals& g, std::uint32_t min_qubits, std::uint32_t max_qubits, std::ostream& out) {
  if (min_qubits > max_qubits) throw UsageError("--min-qubits exceeds --max-qubits");
  Manager m(g.config());
  header(out, "qft", g);
  out << "qubits,nodes,internal,terminals,ratio\n";
  std::size_t previous = 0;
  for (std::uint32_t n = min_qubits; n <= max_qubits; ++n) {
    const NodeStats s = stats(build_inverse_qft(m, n));
    out << n << "," << s.total << "," << s.internal_count << "," << s.terminal_count << ","
        << (previous ? fmt("%.4f", double(s.total) / double(previous)) : std::string("-")) << "\n";
    previous = s.total;
    m.collect();
  }
  return kExitOk;
}

// ---- persist ----

struct PersistOptions {
  std::string file;
  std::vector<std::string> sets;
  bool force_float = false;
};

int cmd_persist(const Globals& g, const PersistOptions& o, std::ostream& out, std::istream& in) {
  header(out, "persist", g);
  std::size_t line_number = 0;
  for (const std::string& s : o.sets)
    out << persist::classify_and_describe(persist::parse_set(s, o.force_float, ++line_number)) << "\n";
  if (!o.sets.empty() && o.file.empty()) return kExitOk;

  std::istringstream lines(read_input(o.file.empty() ? "-" : o.file, in));
  std::string line;
  line_number = 0;
  while (std::getline(lines, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    out << persist::classify_and_describe(persist::parse_set(line, o.force_float, line_number))
        << "\n";
  }
  return kExitOk;
}

// ---- bench ----

struct BenchOptions {
  std::uint32_t min_qubits = 4;
  std::uint32_t max_qubits = 12;
  std::size_t random = 0;
  std::uint32_t random_width = 6;
  std::size_t random_depth = 20;
};

std::string dense_bytes(std::uint32_t qubits) {
  if (qubits > 59) return "-";
  return std::to_string(std::uint64_t{16} << qubits);
}

int cmd_bench(const Globals& g, const BenchOptions& o, std::ostream& out) {
  if (o.min_qubits > o.max_qubits) throw UsageError("--min-qubits exceeds --max-qubits");
  if (o.random_width > kDenseSimulationCap)
    throw UsageError("--random-width is capped at " + std::to_string(kDenseSimulationCap));

  Manager m(g.config());
  header(out, "bench", g);
  out << "# seed=" << g.seed << "\n";
  out << "# grover, all-ones pattern; qubits counts the oracle qubit\n";
  out << "qubits,iterations,quidd_ms,peak_state_nodes,peak_live_nodes,quidd_bytes,dense_ms,"
         "dense_bytes\n";
  for (std::uint32_t n = o.min_qubits; n <= o.max_qubits; ++n) {
    const OraclePattern p(std::string(n, '1'));
    const GroverTrace t = run_grover(m, p);
    std::size_t terminals = 0;
    for (const GroverRecord& r : t.records) terminals = std::max(terminals, r.state_terminals);

    std::string dense_ms = "-";
    if (p.total_qubits() <= kDenseSimulationCap) {
      const auto t0 = Clock::now();
      dense_grover_trace(p, t.iterations_run);
      dense_ms = fmt("%.3f", ms_since(t0));
    }
    out << p.total_qubits() << "," << t.iterations_run << "," << fmt("%.3f", t.total_ms) << ","
        << t.peak_state_nodes << "," << t.peak_live_nodes << ","
        << approx_bytes(t.peak_live_nodes, terminals, m.bits()) << "," << dense_ms << ","
        << dense_bytes(p.total_qubits()) << "\n";
    m.collect();
  }

  if (o.random == 0) return kExitOk;
  std::mt19937_64 rng(g.seed);
  out << "\n# random circuits\n";
  out << "circuit,qubits,gates,quidd_ms,final_nodes,dense_ms,max_deviation\n";
  for (std::size_t i = 0; i < o.random; ++i) {
    const Circuit c = random_circuit(o.random_width, o.random_depth, rng);
    auto t0 = Clock::now();
    const QuiddVector state = run(m, c);
    const double quidd_ms = ms_since(t0);
    t0 = Clock::now();
    const DenseState dense = dense_simulate(c);
    const double dense_ms = ms_since(t0);
    const auto ours = to_dense(state);
    double dev = 0;
    for (std::size_t k = 0; k < dense.size(); ++k) dev = std::max(dev, std::abs(dense[k] - ours[k]));
    out << i + 1 << "," << c.width << "," << c.gates.size() << "," << fmt("%.3f", quidd_ms) << ","
        << stats(state).total << "," << fmt("%.3f", dense_ms) << "," << fmt("%.3e", dev) << "\n";
  }
  return kExitOk;
}

}  // namespace

std::vector<Amplitude> top_amplitudes(const QuiddVector& v, std::size_t k) {
  if (!is_vector_shaped(v)) throw DimensionMismatch("top_amplitudes expects a vector");
  Manager& m = v.handle.manager();
  const NodeRef root = v.handle.root();

  std::vector<NodeRef> terminals;
  {
    std::unordered_set<NodeRef> seen;
    std::vector<NodeRef> stack{root};
    while (!stack.empty()) {
      const NodeRef r = stack.back();
      stack.pop_back();
      if (!seen.insert(r).second) continue;
      if (m.is_terminal(r)) {
        terminals.push_back(r);
      } else {
        stack.push_back(m.node(r).hi);
        stack.push_back(m.node(r).lo);
      }
    }
  }

  std::vector<std::pair<double, NodeRef>> by_magnitude;
  for (NodeRef t : terminals) {
    const double a = std::abs(m.value(t).to_std());
    if (a > 0) by_magnitude.emplace_back(a, t);
  }
  std::sort(by_magnitude.begin(), by_magnitude.end(),
            [](const auto& x, const auto& y) { return x.first > y.first; });

  std::vector<Amplitude> result;
  std::string bits(v.qubits, '0');
  for (std::size_t i = 0; i < by_magnitude.size() && result.size() < k;) {
    // Terminals whose magnitudes agree to double precision are ranked together.
    std::unordered_set<NodeRef> group;
    const double top = by_magnitude[i].first;
    for (; i < by_magnitude.size() && top - by_magnitude[i].first <= 1e-12 * top; ++i)
      group.insert(by_magnitude[i].second);

    std::unordered_map<NodeRef, bool> reaches;
    std::function<bool(NodeRef)> can_reach = [&](NodeRef r) {
      if (m.is_terminal(r)) return group.count(r) > 0;
      if (auto it = reaches.find(r); it != reaches.end()) return it->second;
      const bool b = can_reach(m.node(r).hi) || can_reach(m.node(r).lo);
      reaches.emplace(r, b);
      return b;
    };
    std::function<void(NodeRef, std::uint32_t)> walk = [&](NodeRef r, std::uint32_t q) {
      if (result.size() >= k || !can_reach(r)) return;
      if (q == v.qubits) {
        const std::complex<double> z = m.value(r).to_std();
        result.push_back({bits, z, std::norm(z)});
        return;
      }
      const bool tests = !m.is_terminal(r) && m.level(r) == 2 * q + 1;
      for (char b : {'0', '1'}) {
        bits[q] = b;
        walk(tests ? (b == '1' ? m.node(r).hi : m.node(r).lo) : r, q + 1);
      }
      bits[q] = '0';
    };
    walk(root, 0);
  }
  return result;
}

std::size_t approx_bytes(std::size_t nodes, std::size_t terminals, unsigned mantissa_bits) {
  // Two MPFR numbers per terminal: a fixed header and the limbs.
  const std::size_t per_terminal = 2 * (32 + (mantissa_bits + 63) / 64 * 8);
  return nodes * kNodeBytes + terminals * per_terminal;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            std::istream& in) {
  CLI::App app{"Quantum information decision diagrams: circuits, Grover search, QFT growth"};
  app.name("quidd");
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Read flags from a TOML/INI file");

  Globals g;
  app.add_option("--precision-bits", g.precision_bits, "Mantissa bits of terminal values")
      ->check(CLI::Range(16u, 65536u))
      ->capture_default_str();
  app.add_option("--epsilon", g.epsilon, "Terminal merge tolerance (relative)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  app.add_option("--seed", g.seed, "Seed for randomized runs")->capture_default_str();

  RunOptions ro;
  auto* run_cmd = app.add_subcommand("run", "Simulate a circuit file");
  run_cmd->add_option("file", ro.file, "Circuit file, - for stdin")->required();
  run_cmd->add_flag("--check-dense", ro.check_dense, "Compare against the dense simulator");
  run_cmd->add_option("--top", ro.top, "Amplitudes to list")->capture_default_str();
  run_cmd->add_flag("--steps", ro.steps, "Node counts after every gate");

  GroverCliOptions gro;
  auto* grover_cmd = app.add_subcommand("grover", "Grover search with a pattern oracle");
  grover_cmd->add_option("--qubits", gro.qubits, "Data qubits")->check(CLI::Range(1u, 62u));
  grover_cmd->add_option("--pattern", gro.pattern, "Oracle pattern over {0,1,d}, default all ones");
  grover_cmd->add_option("--trace", gro.trace, "Per-iteration CSV, - for stdout");
  grover_cmd->add_option("--iterations", gro.iterations, "Override the optimal iteration count");
  grover_cmd->add_option("--time-budget", gro.time_budget, "Seconds before aborting")
      ->check(CLI::PositiveNumber);

  std::uint32_t qft_min = 2, qft_max = 8;
  auto* qft_cmd = app.add_subcommand("qft", "Node counts of the inverse QFT operator");
  qft_cmd->add_option("--max-qubits", qft_max)->check(CLI::Range(1u, 12u))->capture_default_str();
  qft_cmd->add_option("--min-qubits", qft_min)->check(CLI::Range(1u, 12u))->capture_default_str();

  PersistOptions po;
  auto* persist_cmd = app.add_subcommand("persist", "Classify finite sets of complex values");
  persist_cmd->add_option("file", po.file, "One set per line, - or omitted for stdin");
  persist_cmd->add_option("--set", po.sets, "A set given inline, e.g. \"1,-1\"");
  persist_cmd->add_flag("--float", po.force_float, "Use double arithmetic");

  BenchOptions bo;
  auto* bench_cmd = app.add_subcommand("bench", "QuIDD against dense state vectors");
  bench_cmd->add_option("--min-qubits", bo.min_qubits, "Smallest data-qubit count")
      ->check(CLI::Range(1u, 40u))
      ->capture_default_str();
  bench_cmd->add_option("--max-qubits", bo.max_qubits, "Largest data-qubit count")
      ->check(CLI::Range(1u, 40u))
      ->capture_default_str();
  bench_cmd->add_option("--random", bo.random, "Random circuits to run as well")->capture_default_str();
  bench_cmd->add_option("--random-width", bo.random_width)->check(CLI::Range(1u, 14u))->capture_default_str();
  bench_cmd->add_option("--random-depth", bo.random_depth)->capture_default_str();

  std::vector<const char*> argv{"quidd"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  std::string source;
  try {
    if (run_cmd->parsed()) {
      source = ro.file;
      return cmd_run(g, ro, out, in);
    }
    if (grover_cmd->parsed()) return cmd_grover(g, gro, out, err);
    if (qft_cmd->parsed()) return cmd_qft(g, qft_min, qft_max, out);
    if (persist_cmd->parsed()) {
      source = po.file.empty() || po.file == "-" ? "<stdin>" : po.file;
      if (!po.sets.empty()) source = "--set";
      return cmd_persist(g, po, out, in);
    }
    if (bench_cmd->parsed()) return cmd_bench(g, bo, out);
  } catch (const UsageError& e) {
    err << "quidd: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "quidd: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ResourceLimit& e) {
    err << "quidd: " << e.what() << "\n";
    return kExitResource;
  } catch (const std::bad_alloc&) {
    err << "quidd: out of memory\n";
    return kExitResource;
  } catch (const ParseError& e) {
    err << "quidd: " << source << ": " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "quidd: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitUsage;
}

}  // namespace quidd::cli
