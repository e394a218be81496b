#pragma once

// Gate-level circuits: IR, file parser, operator builders, the
// diagram-based runner and a dense reference simulator.
//
// Qubit 0 is the most significant bit of a basis-state index, matching the
// variable order (Row(0)/Col(0) at the top of every diagram).

#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "quidd/linalg.hpp"

namespace quidd {

enum class GateKind {
  hadamard,
  pauli_x,
  pauli_y,
  pauli_z,
  identity,
  cnot,
  mcnot,
  phase_shift,  // conditional phase shift: negates |0...0> on its targets
  oracle,       // flips the last qubit when the others match `pattern`
  custom,
};

struct Control {
  std::uint32_t qubit = 0;
  bool positive = true;  // control on |1> when true, on |0> otherwise
  friend bool operator==(const Control&, const Control&) = default;
};

struct Gate {
  GateKind kind = GateKind::identity;
  /// One-qubit kinds apply the same 2x2 matrix to every target. Custom gates
  /// act on up to three targets, the first being the most significant.
  std::vector<std::uint32_t> targets;
  std::vector<Control> controls;
  /// Oracle only: one of '0', '1', 'd' per data qubit (qubits 0..n-2).
  std::string pattern;
  /// Custom only: row-major 2^k x 2^k matrix, k = targets.size().
  std::vector<std::complex<double>> matrix;

  static Gate single(GateKind kind, std::vector<std::uint32_t> targets);
  static Gate cnot(std::uint32_t control, std::uint32_t target);
  static Gate mcnot(std::vector<Control> controls, std::uint32_t target);
  static Gate phase_shift(std::vector<std::uint32_t> targets);
  static Gate oracle(std::string pattern, std::uint32_t width);
  static Gate custom(std::vector<std::uint32_t> targets, std::vector<std::complex<double>> matrix);

  /// Z, I and the conditional phase shift. These are applied through
  /// elementwise_mul with diagonal_operator().
  bool is_diagonal() const;
  std::string name() const;
};

struct Circuit {
  std::uint32_t width = 0;
  std::string initial_state;  // one '0'/'1' per qubit
  std::vector<Gate> gates;
};

/// Throws DimensionMismatch for out-of-range or repeated qubits, or an
/// inconsistent pattern/matrix.
void validate(const Gate& g, std::uint32_t width);
void validate(const Circuit& c);

/// Parses the line-oriented circuit format (see docs/circuit-format.md).
/// Throws ParseError with 1-based line and column.
Circuit parse_circuit(std::string_view text);

inline constexpr std::uint32_t kMaxCustomQubits = 3;
inline constexpr std::uint32_t kDenseSimulationCap = 14;

/// Full 2^n x 2^n operator. Controlled gates are built level by level with
/// the identity on the inactive control branch and the action below the
/// active one.
QuiddMatrix gate_operator(Manager& m, const Gate& g, std::uint32_t width);

/// Diagonal of a diagonal gate as a vector over column variables. Throws
/// std::invalid_argument for non-diagonal gates.
QuiddVector diagonal_operator(Manager& m, const Gate& g, std::uint32_t width);

/// Hadamard on each of qubits [first, first + count), identity elsewhere.
QuiddMatrix hadamard_wall(Manager& m, std::uint32_t width, std::uint32_t first,
                          std::uint32_t count);

/// The conditional phase shift on `targets` written as X, H, C^{k-1}-NOT, H, X.
std::vector<Gate> phase_shift_decomposition(const std::vector<std::uint32_t>& targets);

QuiddVector apply_gate(const QuiddVector& state, const Gate& g);
QuiddVector run(Manager& m, const Circuit& c);

using DenseState = std::vector<std::complex<double>>;

/// Qubit-wise dense simulation in double precision. Throws
/// DimensionMismatch above kDenseSimulationCap qubits.
DenseState dense_simulate(const Circuit& c);
void dense_apply(DenseState& state, std::uint32_t width, const Gate& g);

/// Haar-like random unitary (Gram-Schmidt on Gaussian columns), row-major.
std::vector<std::complex<double>> random_unitary(std::size_t dim, std::mt19937_64& rng);
/// A gate drawn from the whole library; custom gates get random unitaries.
Gate random_gate(std::uint32_t width, std::mt19937_64& rng);
/// Random initial basis state and `depth` random gates.
Circuit random_circuit(std::uint32_t width, std::size_t depth, std::mt19937_64& rng);

/// Inverse DFT on 2^n points, entries w^(-rc)/sqrt(N) with w = e^(2 pi i/N).
QuiddMatrix build_inverse_qft(Manager& m, std::uint32_t n);

}  // namespace quidd
