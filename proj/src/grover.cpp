#include "quidd/grover.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <unordered_map>

#include "quidd/errors.hpp"

namespace quidd {

std::uint64_t iterations_for(std::uint32_t data_qubits, std::uint64_t solutions) {
  if (data_qubits == 0 || data_qubits > 62) throw std::invalid_argument("data qubits must be in 1..62");
  const std::uint64_t n_states = std::uint64_t{1} << data_qubits;
  if (solutions < 1 || solutions > n_states) throw std::invalid_argument("solutions must be in 1..2^n");
  const long double pi = 3.141592653589793238462643383279502884L;
  return static_cast<std::uint64_t>(
      std::floor(pi / 4 * std::sqrt(static_cast<long double>(n_states) / static_cast<long double>(solutions))));
}

GroverParams GroverParams::make(std::uint32_t data_qubits, std::uint64_t solutions) {
  GroverParams p;
  p.iterations = iterations_for(data_qubits, solutions);
  p.data_qubits = data_qubits;
  p.solutions = solutions;
  p.database_size = std::ldexp(1.0, static_cast<int>(data_qubits));
  p.theta = std::sqrt(static_cast<double>(solutions) / p.database_size);
  return p;
}

// ---- patterns ----

OraclePattern::OraclePattern(std::string pattern) : pattern_(std::move(pattern)) {
  if (pattern_.empty()) throw std::invalid_argument("empty oracle pattern");
  for (char ch : pattern_) {
    if (ch != '0' && ch != '1' && ch != 'd') {
      throw std::invalid_argument("oracle pattern symbols are 0, 1 and d, got '" + std::string(1, ch) + "'");
    }
  }
}

OraclePattern OraclePattern::trailing_dont_cares(std::uint32_t data_qubits, std::uint32_t k) {
  if (k > data_qubits) throw std::invalid_argument("more don't-cares than data qubits");
  return OraclePattern(std::string(data_qubits - k, '1') + std::string(k, 'd'));
}

OraclePattern OraclePattern::leading_ones(std::uint32_t data_qubits, std::uint32_t ones) {
  if (ones > data_qubits) throw std::invalid_argument("more ones than data qubits");
  return OraclePattern(std::string(ones, '1') + std::string(data_qubits - ones, 'd'));
}

std::uint64_t OraclePattern::solutions() const {
  const auto d = std::count(pattern_.begin(), pattern_.end(), 'd');
  if (d > 62) throw std::overflow_error("too many solutions to count");
  return std::uint64_t{1} << d;
}

bool OraclePattern::matches(std::uint64_t data_index) const {
  const std::uint32_t n = data_qubits();
  for (std::uint32_t q = 0; q < n; ++q) {
    const char ch = pattern_[q];
    if (ch == 'd') continue;
    const bool bit = (data_index >> (n - 1 - q)) & 1u;
    if (bit != (ch == '1')) return false;
  }
  return true;
}

// ---- operators ----

QuiddMatrix build_oracle(Manager& m, const OraclePattern& p) {
  return gate_operator(m, Gate::oracle(p.str(), p.total_qubits()), p.total_qubits());
}

GroverOperators build_grover_operators(Manager& m, const OraclePattern& p) {
  const std::uint32_t n = p.data_qubits(), total = n + 1;
  std::vector<std::uint32_t> data(n);
  for (std::uint32_t q = 0; q < n; ++q) data[q] = q;
  return {build_oracle(m, p), hadamard_wall(m, total, 0, n),
          diagonal_operator(m, Gate::phase_shift(data), total), hadamard_wall(m, total, 0, total),
          hadamard_wall(m, total, n, 1)};
}

QuiddVector grover_initial_state(Manager& m, const GroverOperators& ops, std::uint32_t total_qubits) {
  std::string bits(total_qubits, '0');
  bits.back() = '1';
  return matmul(ops.all_hadamards, basis_state(m, bits));
}

QuiddVector grover_iteration(const GroverOperators& ops, const QuiddVector& state) {
  QuiddVector s = matmul(ops.oracle, state);
  s = matmul(ops.data_hadamards, s);
  s = elementwise_mul(ops.phase_shift, s);
  return matmul(ops.data_hadamards, s);
}

// ---- success probability ----

Real success_probability(const QuiddVector& state, const OraclePattern& p) {
  const std::uint32_t n = p.data_qubits();
  if (state.qubits != n + 1) throw DimensionMismatch("state width differs from the oracle's");
  Manager& m = state.handle.manager();
  const unsigned bits = m.bits();
  std::unordered_map<std::uint64_t, Real> memo;
  // Sum of |amplitude|^2 over matching assignments of qubits q..n.
  std::function<Real(NodeRef, std::uint32_t)> sum = [&](NodeRef f, std::uint32_t q) -> Real {
    if (q == n + 1) {
      if (!m.is_terminal(f)) throw DimensionMismatch("state depends on qubits beyond its width");
      return m.value(f).norm();
    }
    const std::uint64_t key = (std::uint64_t{f} << 32) | q;
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    const std::uint32_t level = 2 * q + 1;
    if (!m.is_terminal(f) && m.level(f) < level) throw DimensionMismatch("state is not a column vector");
    const char ch = q < n ? p.str()[q] : 'd';
    Real r(bits);
    if (ch != '0') r += sum(m.cofactor(f, level, true), q + 1);
    if (ch != '1') r += sum(m.cofactor(f, level, false), q + 1);
    memo.emplace(key, r);
    return r;
  };
  return sum(state.handle.root(), 0);
}

Real success_probability_by_measurement(const QuiddVector& state, const OraclePattern& p) {
  const std::uint32_t n = p.data_qubits();
  if (state.qubits != n + 1) throw DimensionMismatch("state width differs from the oracle's");
  Manager& m = state.handle.manager();
  const NodeRef z = m.zero_ref();
  NodeRef proj = m.one_ref();
  for (std::uint32_t q = n + 1; q-- > 0;) {
    const char ch = q < n ? p.str()[q] : 'd';
    const NodeRef on1 = ch == '0' ? z : m.internal_ref(2 * q + 1, proj, z);
    const NodeRef on0 = ch == '1' ? z : m.internal_ref(2 * q + 1, z, proj);
    proj = m.internal_ref(2 * q, on1, on0);
  }
  const QuiddMatrix projector{m.wrap(proj), n + 1};
  try {
    return measure(state, projector).probability;
  } catch (const ZeroProbability&) {
    return Real(0.0, m.bits());
  }
}

// ---- driver ----

std::uint64_t GroverTrace::peak_iteration() const {
  std::uint64_t best = 0;
  double best_p = -1;
  for (const GroverRecord& r : records) {
    if (r.success_probability > best_p) {
      best_p = r.success_probability;
      best = r.iteration;
    }
  }
  return best;
}

namespace {

class AutoCollectGuard {
 public:
  explicit AutoCollectGuard(Manager& m) : m_(m), saved_(m.auto_collect()) { m_.set_auto_collect(false); }
  ~AutoCollectGuard() { m_.set_auto_collect(saved_); }
  AutoCollectGuard(const AutoCollectGuard&) = delete;
  AutoCollectGuard& operator=(const AutoCollectGuard&) = delete;

 private:
  Manager& m_;
  bool saved_;
};

OpCounters operator-(const OpCounters& a, const OpCounters& b) {
  return {a.apply_calls - b.apply_calls, a.apply_hits - b.apply_hits, a.matmul_calls - b.matmul_calls,
          a.matmul_hits - b.matmul_hits};
}

}  // namespace

GroverTrace run_grover(Manager& m, const OraclePattern& p, const GroverOptions& options) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  const auto ms_since_start = [&] {
    return std::chrono::duration<double, std::milli>(clock::now() - start).count();
  };

  GroverTrace trace;
  trace.params = p.params();
  const std::uint64_t rounds = options.iterations.value_or(trace.params.iterations);
  const std::uint32_t total = p.total_qubits();

  // Collection happens between iterations only, so every iteration starts
  // from the same empty computed table.
  AutoCollectGuard guard(m);
  const GroverOperators ops = build_grover_operators(m, p);
  QuiddVector state = grover_initial_state(m, ops, total);

  auto record = [&](std::uint64_t i, const OpCounters& counted) {
    const NodeStats st = stats(state);
    GroverRecord r;
    r.iteration = i;
    r.success_probability = success_probability(state, p).to_double();
    r.state_nodes = st.total;
    r.state_terminals = st.terminal_count;
    r.readout_terminals = stats(matmul(ops.oracle_hadamard, state)).terminal_count;
    r.ops = counted;
    r.elapsed_ms = ms_since_start();
    trace.peak_state_nodes = std::max(trace.peak_state_nodes, st.total);
    trace.records.push_back(r);
    if (options.on_iteration) options.on_iteration(trace.records.back());
  };
  record(0, {});

  for (std::uint64_t i = 1; i <= rounds; ++i) {
    m.collect();
    const OpCounters before = m.counters();
    state = grover_iteration(ops, state);
    const OpCounters counted = m.counters() - before;
    trace.peak_live_nodes = std::max(trace.peak_live_nodes, m.live_nodes());
    record(i, counted);
    trace.iterations_run = i;
    if (options.time_budget_secs && ms_since_start() > *options.time_budget_secs * 1000.0) {
      throw ResourceLimit("time budget of " + std::to_string(*options.time_budget_secs) +
                          " s exceeded after " + std::to_string(i) + " of " + std::to_string(rounds) +
                          " iterations");
    }
  }
  trace.final_state = matmul(ops.oracle_hadamard, state);
  m.collect();
  trace.peak_live_nodes = std::max(trace.peak_live_nodes, m.live_nodes());
  trace.total_ms = ms_since_start();
  return trace;
}

std::optional<double> time_budget_from_env() {
  const char* v = std::getenv("QUIDD_TIME_BUDGET_SECS");
  if (!v || !*v) return std::nullopt;
  char* end = nullptr;
  const double secs = std::strtod(v, &end);
  if (end == v || *end != '\0' || !(secs > 0)) {
    throw std::invalid_argument(std::string("QUIDD_TIME_BUDGET_SECS is not a positive number: ") + v);
  }
  return secs;
}

std::vector<double> dense_grover_trace(const OraclePattern& p, std::uint64_t iterations) {
  const std::uint32_t n = p.data_qubits(), total = n + 1;
  if (total > kDenseSimulationCap) throw DimensionMismatch("dense Grover is capped at the dense simulation limit");
  std::vector<std::uint32_t> data(n), all(total);
  for (std::uint32_t q = 0; q < total; ++q) all[q] = q;
  for (std::uint32_t q = 0; q < n; ++q) data[q] = q;
  const Gate oracle = Gate::oracle(p.str(), total);
  const Gate h_data = Gate::single(GateKind::hadamard, data);
  const Gate h_all = Gate::single(GateKind::hadamard, all);
  const Gate cps = Gate::phase_shift(data);

  DenseState s(std::size_t{1} << total, 0.0);
  s[1] = 1.0;
  dense_apply(s, total, h_all);
  auto probability = [&] {
    double sum = 0;
    for (std::uint64_t i = 0; i < s.size(); ++i) {
      if (p.matches(i >> 1)) sum += std::norm(s[i]);
    }
    return sum;
  };
  std::vector<double> out{probability()};
  for (std::uint64_t i = 0; i < iterations; ++i) {
    dense_apply(s, total, oracle);
    dense_apply(s, total, h_data);
    dense_apply(s, total, cps);
    dense_apply(s, total, h_data);
    out.push_back(probability());
  }
  return out;
}

OperatorSizes operator_sizes(std::uint32_t total_qubits) {
  if (total_qubits < 11) throw std::invalid_argument("operator sizes need at least 11 qubits");
  const std::uint32_t n = total_qubits, data = n - 1;
  Manager m;
  std::vector<std::uint32_t> data_qubits(data);
  for (std::uint32_t q = 0; q < data; ++q) data_qubits[q] = q;
  OperatorSizes s;
  s.total_qubits = n;
  s.initial_hadamards = stats(hadamard_wall(m, n, 0, n)).total;
  s.repeated_hadamards = stats(hadamard_wall(m, n, 0, data)).total;
  s.phase_shift = stats(diagonal_operator(m, Gate::phase_shift(data_qubits), n)).total;
  s.oracle_all_ones = stats(build_oracle(m, OraclePattern::trailing_dont_cares(data, 0))).total;
  s.oracle_mod_1024 = stats(build_oracle(m, OraclePattern::leading_ones(data, 10))).total;
  return s;
}

}  // namespace quidd
