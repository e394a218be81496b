#pragma once

// Matrices and vectors as diagrams, and the operations on them.
//
// An n-qubit matrix depends on Row(0..n-1) and Col(0..n-1). A vector lives
// on Col(0..n-1) only, so matmul(M, v) contracts M's columns against v and
// renames the result's rows back to columns.

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "quidd/manager.hpp"

namespace quidd {

struct QuiddMatrix {
  Diagram handle;
  std::uint32_t qubits = 0;
};

struct QuiddVector {
  Diagram handle;
  std::uint32_t qubits = 0;
};

struct MeasurementOutcome {
  QuiddVector post_state;
  Real probability;
};

// ---- builders ----

QuiddMatrix identity(Manager& m, std::uint32_t qubits);
/// |bits>, e.g. "010"; qubit 0 is the first character.
QuiddVector basis_state(Manager& m, std::string_view bits);
QuiddVector basis_state(Manager& m, std::uint32_t qubits, std::uint64_t index);

/// Matrix whose (r, c) entry is f(r, c). Enumerates all 4^n entries.
QuiddMatrix matrix_from_function(Manager& m, std::uint32_t qubits,
                                 const std::function<Complex(std::uint64_t, std::uint64_t)>& f);
QuiddVector vector_from_function(Manager& m, std::uint32_t qubits,
                                 const std::function<Complex(std::uint64_t)>& f);
/// Row-major 2^n x 2^n entries.
QuiddMatrix matrix_from_dense(Manager& m, std::uint32_t qubits,
                              std::span<const std::complex<double>> entries);
QuiddVector vector_from_dense(Manager& m, std::uint32_t qubits,
                              std::span<const std::complex<double>> entries);

/// Projector onto `qubit` = bit, identity elsewhere.
QuiddMatrix qubit_projector(Manager& m, std::uint32_t qubits, std::uint32_t qubit, bool bit);

/// Row-major dense copy. Throws DimensionMismatch above 12 qubits.
std::vector<std::complex<double>> to_dense(const QuiddMatrix& a);
/// Dense copy. Throws DimensionMismatch above 26 qubits.
std::vector<std::complex<double>> to_dense(const QuiddVector& v);

/// True iff `v` tests no Row variable and no qubit >= v.qubits.
bool is_vector_shaped(const QuiddVector& v);
/// True iff `d` tests no qubit >= `qubits`.
bool fits_qubits(const Diagram& d, std::uint32_t qubits);

// ---- operations ----

QuiddMatrix tensor(const QuiddMatrix& a, const QuiddMatrix& b);
QuiddVector tensor(const QuiddVector& a, const QuiddVector& b);

QuiddMatrix matmul(const QuiddMatrix& a, const QuiddMatrix& b);
QuiddVector matmul(const QuiddMatrix& a, const QuiddVector& v);

QuiddMatrix add(const QuiddMatrix& a, const QuiddMatrix& b);
QuiddVector add(const QuiddVector& a, const QuiddVector& b);
QuiddMatrix subtract(const QuiddMatrix& a, const QuiddMatrix& b);
QuiddVector subtract(const QuiddVector& a, const QuiddVector& b);
QuiddMatrix elementwise_mul(const QuiddMatrix& a, const QuiddMatrix& b);
/// With `a` holding the diagonal of a diagonal matrix D, this is D*b.
QuiddVector elementwise_mul(const QuiddVector& a, const QuiddVector& b);

QuiddMatrix scalar_mul(const Complex& c, const QuiddMatrix& a);
QuiddVector scalar_mul(const Complex& c, const QuiddVector& v);
QuiddMatrix scalar_div(const QuiddMatrix& a, const Real& s);
QuiddVector scalar_div(const QuiddVector& v, const Real& s);

QuiddMatrix transpose(const QuiddMatrix& a);
QuiddMatrix conjugate_transpose(const QuiddMatrix& a);

/// <u|v>, conjugating u.
Complex inner_product(const QuiddVector& u, const QuiddVector& v);
/// <v|v> as a real.
Real norm_squared(const QuiddVector& v);

/// Applies measurement operator `op`; throws ZeroProbability if M|psi> = 0.
MeasurementOutcome measure(const QuiddVector& state, const QuiddMatrix& op);

/// |In(Q1)| + sum_i |In(Qi)| * |Term(Q1 x ... x Q(i-1)) \ {0}| + |Term(Q1 x ... x Qn)|.
/// Terminal sets of the prefixes are formed by all-pairs products under the
/// manager's merge predicate. A zero prefix terminal contributes no copy of
/// Qi since 0 * Qi collapses to the zero terminal.
std::size_t tensor_size_formula(std::span<const Diagram> factors);

/// Node total of the tensor product of `factors`, without building it.
/// Same as tensor_size_formula() except that internal nodes of Qi which are
/// scalar multiples of each other are grouped, since t1*f and t2*g coincide
/// whenever g = (t1/t2)*f. Equal to tensor_size_formula() when no factor has
/// proportional internal nodes.
std::size_t predicted_tensor_nodes(std::span<const Diagram> factors);

inline NodeStats stats(const QuiddMatrix& a) { return a.handle.manager().node_stats(a.handle); }
inline NodeStats stats(const QuiddVector& v) { return v.handle.manager().node_stats(v.handle); }

}  // namespace quidd
