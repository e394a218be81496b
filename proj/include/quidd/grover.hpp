#pragma once

// Grover search on n data qubits plus one oracle qubit (the last,
// least significant one).

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "quidd/circuits.hpp"
#include "quidd/linalg.hpp"

namespace quidd {

/// floor((pi/4) sqrt(2^n / M)). Throws std::invalid_argument unless 1 <= M <= 2^n.
std::uint64_t iterations_for(std::uint32_t data_qubits, std::uint64_t solutions);

struct GroverParams {
  std::uint32_t data_qubits = 0;
  std::uint64_t solutions = 1;
  double database_size = 0;  // 2^n
  double theta = 0;          // sqrt(M / N)
  std::uint64_t iterations = 0;

  static GroverParams make(std::uint32_t data_qubits, std::uint64_t solutions);
};

/// String over {0, 1, d}; character q constrains data qubit q.
class OraclePattern {
 public:
  /// Throws std::invalid_argument on an empty string or another symbol.
  explicit OraclePattern(std::string pattern);

  /// n - k ones followed by k don't-cares ("Oracle N-k").
  static OraclePattern trailing_dont_cares(std::uint32_t data_qubits, std::uint32_t k);
  /// 1^ones d^(n-ones): all solutions share their leading `ones` bits.
  static OraclePattern leading_ones(std::uint32_t data_qubits, std::uint32_t ones);

  const std::string& str() const { return pattern_; }
  std::uint32_t data_qubits() const { return static_cast<std::uint32_t>(pattern_.size()); }
  std::uint32_t total_qubits() const { return data_qubits() + 1; }
  /// 2^(number of d's).
  std::uint64_t solutions() const;
  bool matches(std::uint64_t data_index) const;
  GroverParams params() const { return GroverParams::make(data_qubits(), solutions()); }

 private:
  std::string pattern_;
};

/// (n+1)-qubit operator flipping the oracle qubit on matching data states.
QuiddMatrix build_oracle(Manager& m, const OraclePattern& p);

/// Everything a Grover iteration needs, built once.
struct GroverOperators {
  QuiddMatrix oracle;
  QuiddMatrix data_hadamards;  // H on the data qubits, I on the oracle qubit
  QuiddVector phase_shift;     // diagonal, negates |0...0> on the data qubits
  QuiddMatrix all_hadamards;
  QuiddMatrix oracle_hadamard;  // H on the oracle qubit only
};

GroverOperators build_grover_operators(Manager& m, const OraclePattern& p);

/// |0...0>|1> followed by H on every qubit.
QuiddVector grover_initial_state(Manager& m, const GroverOperators& ops, std::uint32_t total_qubits);

/// One iteration: oracle, H on data, phase shift, H on data.
QuiddVector grover_iteration(const GroverOperators& ops, const QuiddVector& state);

/// Probability of measuring a matching data state, summed directly over the
/// state diagram's matching branches.
Real success_probability(const QuiddVector& state, const OraclePattern& p);

/// Same value through measure() with the projector onto matching states.
Real success_probability_by_measurement(const QuiddVector& state, const OraclePattern& p);

struct GroverRecord {
  std::uint64_t iteration = 0;
  double success_probability = 0;
  std::size_t state_nodes = 0;
  std::size_t state_terminals = 0;
  /// Distinct terminals after H on the oracle qubit (the measured state).
  std::size_t readout_terminals = 0;
  /// Recursion counts of this iteration alone, computed tables cleared first.
  OpCounters ops;
  double elapsed_ms = 0;  // since the start of the run
};

struct GroverOptions {
  /// Defaults to iterations_for().
  std::optional<std::uint64_t> iterations;
  /// Abort with ResourceLimit once exceeded.
  std::optional<double> time_budget_secs;
  /// Called after every recorded iteration.
  std::function<void(const GroverRecord&)> on_iteration;
};

struct GroverTrace {
  GroverParams params;
  std::uint64_t iterations_run = 0;
  /// Entry 0 is the state before the first iteration.
  std::vector<GroverRecord> records;
  /// Final state, including the closing H on the oracle qubit.
  QuiddVector final_state;
  std::size_t peak_state_nodes = 0;
  std::size_t peak_live_nodes = 0;
  double total_ms = 0;

  /// Iteration with the highest success probability (first one on ties).
  std::uint64_t peak_iteration() const;
};

GroverTrace run_grover(Manager& m, const OraclePattern& p, const GroverOptions& options = {});

/// QUIDD_TIME_BUDGET_SECS, when set to a positive number.
std::optional<double> time_budget_from_env();

/// Success probability after iterations 0..iterations on a dense state vector,
/// following the same steps. Throws DimensionMismatch above the dense cap.
std::vector<double> dense_grover_trace(const OraclePattern& p, std::uint64_t iterations);

/// Node totals of the operators in one row of the Grover operator-size table.
struct OperatorSizes {
  std::uint32_t total_qubits = 0;
  std::size_t initial_hadamards = 0;
  std::size_t repeated_hadamards = 0;
  std::size_t phase_shift = 0;
  std::size_t oracle_all_ones = 0;
  std::size_t oracle_mod_1024 = 0;
};

/// `total_qubits` counts the oracle qubit; requires at least 11.
OperatorSizes operator_sizes(std::uint32_t total_qubits);

}  // namespace quidd
