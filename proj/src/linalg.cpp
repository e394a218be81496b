#include "quidd/linalg.hpp"

#include <algorithm>
#include <array>
#include <unordered_map>

namespace quidd {

namespace {

// Library tags for the computed table.
constexpr std::uint32_t kTagMatmul = 16;  // + 4 role combinations
constexpr std::uint32_t kTagTranspose = 24;
constexpr std::uint32_t kTagRowsToCols = 25;

constexpr std::uint32_t kMaxQubits = (1u << 15) - 1;

Manager& same_manager(const Diagram& a, const Diagram& b) {
  Manager& m = a.manager();
  m.check_owned(b);
  return m;
}

void check_qubits(std::uint32_t a, std::uint32_t b, const char* what) {
  if (a != b) {
    throw DimensionMismatch(std::string(what) + ": operands have " + std::to_string(a) + " and " +
                            std::to_string(b) + " qubits");
  }
}

void check_width(std::uint32_t qubits) {
  if (qubits > kMaxQubits) throw DimensionMismatch("too many qubits");
}

std::uint64_t bit_of(std::uint32_t qubits, std::uint32_t q) {
  return std::uint64_t{1} << (qubits - 1 - q);
}

// Sum-of-products recursion with the skipped-level scaling. The left operand
// is a matrix (free Row, summed Col) or a row vector (summed Col); the right
// one a matrix (summed Row, free Col) or a column vector (summed Col).
class Multiplier {
 public:
  Multiplier(Manager& m, std::uint32_t qubits, bool left_matrix, bool right_matrix)
      : m_(m),
        n_(qubits),
        tag_(kTagMatmul + (left_matrix ? 1u : 0u) + (right_matrix ? 2u : 0u)),
        a_free_(left_matrix),
        b_free_(right_matrix),
        b_sum_parity_(right_matrix ? 0u : 1u) {}

  NodeRef run(NodeRef a, NodeRef b) { return rec(a, b, top(a, b)); }

 private:
  std::uint32_t top(NodeRef r) const { return m_.is_terminal(r) ? n_ : m_.level(r) >> 1; }
  std::uint32_t top(NodeRef a, NodeRef b) const { return std::min(top(a), top(b)); }

  NodeRef rec(NodeRef a, NodeRef b, std::uint32_t s) {
    if (a == m_.zero_ref() || b == m_.zero_ref()) return m_.zero_ref();
    if (m_.is_terminal(a) && m_.is_terminal(b)) {
      Complex v = m_.value(a) * m_.value(b);
      return m_.terminal_ref(s ? v.ldexp(static_cast<long>(s)) : v);
    }
    const CacheKey key{tag_, a, b, (n_ << 16) | s};
    if (auto hit = m_.cache_find(key)) {
      ++m_.counters().matmul_hits;
      return *hit;
    }
    ++m_.counters().matmul_calls;

    const std::uint32_t q = top(a, b);
    const std::uint32_t row = 2 * q, col = 2 * q + 1;
    std::array<std::array<NodeRef, 2>, 2> ac{}, bc{};
    for (int r = 0; r < 2; ++r) {
      const NodeRef ar = a_free_ ? m_.cofactor(a, row, r) : a;
      for (int k = 0; k < 2; ++k) ac[r][k] = m_.cofactor(ar, col, k);
    }
    for (int k = 0; k < 2; ++k) {
      const NodeRef bk = m_.cofactor(b, row + b_sum_parity_, k);
      for (int c = 0; c < 2; ++c) bc[k][c] = b_free_ ? m_.cofactor(bk, col, c) : bk;
    }

    std::array<std::array<NodeRef, 2>, 2> res{};
    for (int r = 0; r < (a_free_ ? 2 : 1); ++r) {
      for (int c = 0; c < (b_free_ ? 2 : 1); ++c) {
        const NodeRef a0 = ac[r][0], a1 = ac[r][1];
        const NodeRef b0 = bc[0][c], b1 = bc[1][c];
        if (a0 == a1 && b0 == b1) {
          res[r][c] = rec(a0, b0, s + 1 + (top(a0, b0) - (q + 1)));
        } else {
          const NodeRef t0 = rec(a0, b0, s + (top(a0, b0) - (q + 1)));
          const NodeRef t1 = rec(a1, b1, s + (top(a1, b1) - (q + 1)));
          res[r][c] = m_.apply_ref(t0, t1, ops::add());
        }
      }
    }

    NodeRef out;
    if (a_free_ && b_free_) {
      out = m_.internal_ref(row, m_.internal_ref(col, res[1][1], res[1][0]),
                            m_.internal_ref(col, res[0][1], res[0][0]));
    } else if (a_free_) {
      out = m_.internal_ref(row, res[1][0], res[0][0]);
    } else if (b_free_) {
      out = m_.internal_ref(col, res[0][1], res[0][0]);
    } else {
      out = res[0][0];
    }
    m_.cache_put(key, out);
    return out;
  }

  Manager& m_;
  std::uint32_t n_;
  std::uint32_t tag_;
  bool a_free_;
  bool b_free_;
  std::uint32_t b_sum_parity_;
};

NodeRef rows_to_cols(Manager& m, NodeRef r) {
  if (m.is_terminal(r)) return r;
  const CacheKey key{kTagRowsToCols, r, 0, 0};
  if (auto hit = m.cache_find(key)) return *hit;
  const Node n = m.node(r);
  if (n.level & 1u) throw DimensionMismatch("vector result depends on a column variable");
  const NodeRef out = m.internal_ref(n.level + 1, rows_to_cols(m, n.hi), rows_to_cols(m, n.lo));
  m.cache_put(key, out);
  return out;
}

NodeRef transpose_rec(Manager& m, NodeRef f) {
  if (m.is_terminal(f)) return f;
  const CacheKey key{kTagTranspose, f, 0, 0};
  if (auto hit = m.cache_find(key)) return *hit;
  const std::uint32_t q = m.level(f) >> 1;
  const std::uint32_t row = 2 * q, col = 2 * q + 1;
  std::array<std::array<NodeRef, 2>, 2> g{};
  for (int r = 0; r < 2; ++r) {
    const NodeRef fr = m.cofactor(f, row, r);
    for (int c = 0; c < 2; ++c) g[r][c] = m.cofactor(fr, col, c);
  }
  // new[r][c] = T(old[c][r])
  std::array<std::array<NodeRef, 2>, 2> t{};
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) t[r][c] = transpose_rec(m, g[c][r]);
  }
  const NodeRef out = m.internal_ref(row, m.internal_ref(col, t[1][1], t[1][0]),
                                     m.internal_ref(col, t[0][1], t[0][0]));
  m.cache_put(key, out);
  return out;
}

NodeRef identity_ref(Manager& m, std::uint32_t from, std::uint32_t qubits) {
  NodeRef node = m.one_ref();
  for (std::uint32_t q = qubits; q-- > from;) {
    node = m.internal_ref(2 * q, m.internal_ref(2 * q + 1, node, m.zero_ref()),
                          m.internal_ref(2 * q + 1, m.zero_ref(), node));
  }
  return node;
}

template <class T>
T binary(const T& a, const T& b, const BinaryOp& op, const char* what) {
  Manager& m = same_manager(a.handle, b.handle);
  check_qubits(a.qubits, b.qubits, what);
  return {m.apply(a.handle, b.handle, op), a.qubits};
}

template <class T>
T scale(const Complex& c, const T& a) {
  Manager& m = a.handle.manager();
  Diagram k = m.constant(c);
  return {m.apply(k, a.handle, ops::multiply()), a.qubits};
}

template <class T>
T divide(const T& a, const Real& s) {
  if (s.is_zero()) throw std::domain_error("division by zero");
  Manager& m = a.handle.manager();
  const UnaryOp op{[&s](const Complex& v) { return v / s; }, std::nullopt};
  return {m.map_terminals(a.handle, op), a.qubits};
}

}  // namespace

// ---- builders ----

QuiddMatrix identity(Manager& m, std::uint32_t qubits) {
  check_width(qubits);
  m.maybe_collect();
  return {m.wrap(identity_ref(m, 0, qubits)), qubits};
}

QuiddVector basis_state(Manager& m, std::string_view bits) {
  check_width(static_cast<std::uint32_t>(std::min<std::size_t>(bits.size(), kMaxQubits + 1)));
  m.maybe_collect();
  const auto n = static_cast<std::uint32_t>(bits.size());
  NodeRef node = m.one_ref();
  for (std::uint32_t q = n; q-- > 0;) {
    const char ch = bits[q];
    if (ch != '0' && ch != '1') throw std::invalid_argument("basis state must be a 0/1 string");
    node = ch == '1' ? m.internal_ref(2 * q + 1, node, m.zero_ref())
                     : m.internal_ref(2 * q + 1, m.zero_ref(), node);
  }
  return {m.wrap(node), n};
}

QuiddVector basis_state(Manager& m, std::uint32_t qubits, std::uint64_t index) {
  if (qubits < 64 && (index >> qubits) != 0) throw DimensionMismatch("basis index out of range");
  std::string bits(qubits, '0');
  for (std::uint32_t q = 0; q < qubits; ++q) {
    const std::uint32_t shift = qubits - 1 - q;
    if (shift < 64 && ((index >> shift) & 1u)) bits[q] = '1';
  }
  return basis_state(m, bits);
}

QuiddMatrix matrix_from_function(Manager& m, std::uint32_t qubits,
                                 const std::function<Complex(std::uint64_t, std::uint64_t)>& f) {
  if (qubits > 14) throw DimensionMismatch("dense matrix construction limited to 14 qubits");
  m.maybe_collect();
  std::function<NodeRef(std::uint32_t, std::uint64_t, std::uint64_t)> build =
      [&](std::uint32_t level, std::uint64_t r, std::uint64_t c) -> NodeRef {
    if (level == 2 * qubits) return m.terminal_ref(f(r, c));
    const std::uint64_t bit = bit_of(qubits, level >> 1);
    if (level & 1u) return m.internal_ref(level, build(level + 1, r, c | bit), build(level + 1, r, c));
    return m.internal_ref(level, build(level + 1, r | bit, c), build(level + 1, r, c));
  };
  return {m.wrap(build(0, 0, 0)), qubits};
}

QuiddVector vector_from_function(Manager& m, std::uint32_t qubits,
                                 const std::function<Complex(std::uint64_t)>& f) {
  if (qubits > 26) throw DimensionMismatch("dense vector construction limited to 26 qubits");
  m.maybe_collect();
  std::function<NodeRef(std::uint32_t, std::uint64_t)> build = [&](std::uint32_t q,
                                                                   std::uint64_t i) -> NodeRef {
    if (q == qubits) return m.terminal_ref(f(i));
    return m.internal_ref(2 * q + 1, build(q + 1, i | bit_of(qubits, q)), build(q + 1, i));
  };
  return {m.wrap(build(0, 0)), qubits};
}

QuiddMatrix matrix_from_dense(Manager& m, std::uint32_t qubits,
                              std::span<const std::complex<double>> entries) {
  if (qubits > 14 || entries.size() != (std::size_t{1} << (2 * qubits))) {
    throw DimensionMismatch("dense matrix size does not match qubit count");
  }
  const std::uint64_t dim = std::uint64_t{1} << qubits;
  const unsigned b = m.bits();
  return matrix_from_function(m, qubits, [&](std::uint64_t r, std::uint64_t c) {
    return Complex(entries[r * dim + c], b);
  });
}

QuiddVector vector_from_dense(Manager& m, std::uint32_t qubits,
                              std::span<const std::complex<double>> entries) {
  if (qubits > 26 || entries.size() != (std::size_t{1} << qubits)) {
    throw DimensionMismatch("dense vector size does not match qubit count");
  }
  const unsigned b = m.bits();
  return vector_from_function(m, qubits,
                              [&](std::uint64_t i) { return Complex(entries[i], b); });
}

QuiddMatrix qubit_projector(Manager& m, std::uint32_t qubits, std::uint32_t qubit, bool bit) {
  if (qubit >= qubits) throw DimensionMismatch("projector qubit out of range");
  m.maybe_collect();
  const NodeRef below = identity_ref(m, qubit + 1, qubits);
  const NodeRef z = m.zero_ref();
  NodeRef node = bit ? m.internal_ref(2 * qubit, m.internal_ref(2 * qubit + 1, below, z), z)
                     : m.internal_ref(2 * qubit, z, m.internal_ref(2 * qubit + 1, z, below));
  for (std::uint32_t q = qubit; q-- > 0;) {
    node = m.internal_ref(2 * q, m.internal_ref(2 * q + 1, node, z),
                          m.internal_ref(2 * q + 1, z, node));
  }
  return {m.wrap(node), qubits};
}

std::vector<std::complex<double>> to_dense(const QuiddMatrix& a) {
  const std::uint32_t n = a.qubits;
  if (n > 12) throw DimensionMismatch("dense export limited to 12-qubit matrices");
  Manager& m = a.handle.manager();
  const std::uint64_t dim = std::uint64_t{1} << n;
  std::vector<std::complex<double>> out(dim * dim);
  std::function<void(NodeRef, std::uint32_t, std::uint64_t, std::uint64_t)> fill =
      [&](NodeRef f, std::uint32_t q, std::uint64_t r, std::uint64_t c) {
        if (q == n) {
          if (!m.is_terminal(f)) throw DimensionMismatch("matrix depends on qubits beyond its width");
          out[r * dim + c] = m.value(f).to_std();
          return;
        }
        const std::uint64_t bit = bit_of(n, q);
        for (int rb = 0; rb < 2; ++rb) {
          const NodeRef fr = m.cofactor(f, 2 * q, rb);
          for (int cb = 0; cb < 2; ++cb) {
            fill(m.cofactor(fr, 2 * q + 1, cb), q + 1, rb ? r | bit : r, cb ? c | bit : c);
          }
        }
      };
  fill(a.handle.root(), 0, 0, 0);
  return out;
}

std::vector<std::complex<double>> to_dense(const QuiddVector& v) {
  const std::uint32_t n = v.qubits;
  if (n > 26) throw DimensionMismatch("dense export limited to 26-qubit vectors");
  Manager& m = v.handle.manager();
  std::vector<std::complex<double>> out(std::size_t{1} << n);
  std::function<void(NodeRef, std::uint32_t, std::uint64_t)> fill = [&](NodeRef f, std::uint32_t q,
                                                                        std::uint64_t i) {
    if (m.is_terminal(f)) {
      // Constant over the remaining qubits.
      const std::complex<double> val = m.value(f).to_std();
      const std::uint64_t span = std::uint64_t{1} << (n - q);
      std::fill(out.begin() + static_cast<std::ptrdiff_t>(i),
                out.begin() + static_cast<std::ptrdiff_t>(i + span), val);
      return;
    }
    if (q == n || (m.level(f) & 1u) == 0) {
      throw DimensionMismatch("not a vector over its qubit count");
    }
    fill(m.cofactor(f, 2 * q + 1, true), q + 1, i | bit_of(n, q));
    fill(m.cofactor(f, 2 * q + 1, false), q + 1, i);
  };
  fill(v.handle.root(), 0, 0);
  return out;
}

bool fits_qubits(const Diagram& d, std::uint32_t qubits) {
  auto q = d.manager().max_qubit(d);
  return !q || *q < qubits;
}

bool is_vector_shaped(const QuiddVector& v) {
  return fits_qubits(v.handle, v.qubits) && v.handle.manager().independent_of(v.handle, VarKind::row);
}

// ---- operations ----

QuiddMatrix tensor(const QuiddMatrix& a, const QuiddMatrix& b) {
  Manager& m = same_manager(a.handle, b.handle);
  check_width(a.qubits + b.qubits);
  Diagram shifted = m.shift_variables(b.handle, a.qubits);
  return {m.apply(a.handle, shifted, ops::multiply()), a.qubits + b.qubits};
}

QuiddVector tensor(const QuiddVector& a, const QuiddVector& b) {
  Manager& m = same_manager(a.handle, b.handle);
  check_width(a.qubits + b.qubits);
  Diagram shifted = m.shift_variables(b.handle, a.qubits);
  return {m.apply(a.handle, shifted, ops::multiply()), a.qubits + b.qubits};
}

QuiddMatrix matmul(const QuiddMatrix& a, const QuiddMatrix& b) {
  Manager& m = same_manager(a.handle, b.handle);
  check_qubits(a.qubits, b.qubits, "matmul");
  m.maybe_collect();
  Multiplier mul(m, a.qubits, true, true);
  return {m.wrap(mul.run(a.handle.root(), b.handle.root())), a.qubits};
}

QuiddVector matmul(const QuiddMatrix& a, const QuiddVector& v) {
  Manager& m = same_manager(a.handle, v.handle);
  check_qubits(a.qubits, v.qubits, "matmul");
  m.maybe_collect();
  Multiplier mul(m, a.qubits, true, false);
  const NodeRef on_rows = mul.run(a.handle.root(), v.handle.root());
  return {m.wrap(rows_to_cols(m, on_rows)), a.qubits};
}

QuiddMatrix add(const QuiddMatrix& a, const QuiddMatrix& b) {
  return binary(a, b, ops::add(), "add");
}
QuiddVector add(const QuiddVector& a, const QuiddVector& b) {
  return binary(a, b, ops::add(), "add");
}
QuiddMatrix subtract(const QuiddMatrix& a, const QuiddMatrix& b) {
  return binary(a, b, ops::subtract(), "subtract");
}
QuiddVector subtract(const QuiddVector& a, const QuiddVector& b) {
  return binary(a, b, ops::subtract(), "subtract");
}
QuiddMatrix elementwise_mul(const QuiddMatrix& a, const QuiddMatrix& b) {
  return binary(a, b, ops::multiply(), "elementwise_mul");
}
QuiddVector elementwise_mul(const QuiddVector& a, const QuiddVector& b) {
  return binary(a, b, ops::multiply(), "elementwise_mul");
}

QuiddMatrix scalar_mul(const Complex& c, const QuiddMatrix& a) { return scale(c, a); }
QuiddVector scalar_mul(const Complex& c, const QuiddVector& v) { return scale(c, v); }
QuiddMatrix scalar_div(const QuiddMatrix& a, const Real& s) { return divide(a, s); }
QuiddVector scalar_div(const QuiddVector& v, const Real& s) { return divide(v, s); }

QuiddMatrix transpose(const QuiddMatrix& a) {
  Manager& m = a.handle.manager();
  m.maybe_collect();
  return {m.wrap(transpose_rec(m, a.handle.root())), a.qubits};
}

QuiddMatrix conjugate_transpose(const QuiddMatrix& a) {
  QuiddMatrix t = transpose(a);
  Manager& m = a.handle.manager();
  return {m.map_terminals(t.handle, ops::conjugate()), a.qubits};
}

Complex inner_product(const QuiddVector& u, const QuiddVector& v) {
  Manager& m = same_manager(u.handle, v.handle);
  check_qubits(u.qubits, v.qubits, "inner_product");
  Diagram cu = m.map_terminals(u.handle, ops::conjugate());
  Multiplier mul(m, u.qubits, false, false);
  const NodeRef r = mul.run(cu.root(), v.handle.root());
  if (!m.is_terminal(r)) throw DimensionMismatch("inner_product operands are not vectors");
  return m.value(r);
}

Real norm_squared(const QuiddVector& v) { return inner_product(v, v).re(); }

MeasurementOutcome measure(const QuiddVector& state, const QuiddMatrix& op) {
  same_manager(state.handle, op.handle);
  check_qubits(state.qubits, op.qubits, "measure");
  QuiddVector projected = matmul(op, state);
  Manager& m = state.handle.manager();
  if (projected.handle.root() == m.zero_ref()) throw ZeroProbability();
  Real p = norm_squared(projected);
  if (p.sign() <= 0) throw ZeroProbability();
  QuiddVector post = scalar_div(projected, p.sqrt());
  const Real one(1.0, p.precision());
  if (p > one && (p - one).to_double() < 1e-12) p = one;
  return {std::move(post), std::move(p)};
}

namespace {

// Values deduplicated with the manager's merge predicate, in insertion order.
class ValueSet {
 public:
  explicit ValueSet(const PrecisionConfig& cfg) : table_(cfg), bits_(cfg.mantissa_bits) {}

  void insert(const Complex& v) {
    Complex r = v.rounded(bits_);
    if (!table_.find(r)) {
      table_.intern(r);
      values_.push_back(std::move(r));
    }
  }
  const std::vector<Complex>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  std::size_t nonzero() const {
    return static_cast<std::size_t>(std::count_if(values_.begin(), values_.end(),
                                                  [](const Complex& v) { return !v.is_zero(); }));
  }

 private:
  TerminalTable table_;
  unsigned bits_;
  std::vector<Complex> values_;
};

ValueSet product_set(const ValueSet& a, const std::vector<Complex>& b, const PrecisionConfig& cfg) {
  ValueSet out(cfg);
  for (const Complex& x : a.values())
    for (const Complex& y : b) out.insert(x * y);
  return out;
}

// Value reached by preferring else-edges that do not lead to the zero
// terminal. Two proportional nodes reach their values along the same path.
const Complex& lead_value(const Manager& m, NodeRef r) {
  while (!m.is_terminal(r)) {
    const Node& n = m.node(r);
    r = n.lo != m.zero_ref() ? n.lo : n.hi;
  }
  return m.value(r);
}

// Number of distinct nodes t*f for t in `scales` (nonzero) and f an
// internal node of d.
std::size_t scaled_copies(Manager& m, const Diagram& d, const ValueSet& scales,
                          const PrecisionConfig& cfg) {
  std::vector<std::pair<NodeRef, std::vector<Complex>>> classes;
  std::unordered_map<NodeRef, std::size_t> class_of;
  for (NodeRef f : m.internal_nodes(d)) {
    const Complex lead = lead_value(m, f);
    const UnaryOp normalize{[&lead](const Complex& v) { return v / lead; }, std::nullopt};
    const NodeRef shape = m.map_ref(f, normalize);
    auto [it, fresh] = class_of.emplace(shape, classes.size());
    if (fresh) classes.push_back({shape, {}});
    classes[it->second].second.push_back(lead);
  }
  std::size_t total = 0;
  for (const auto& [shape, leads] : classes) {
    ValueSet distinct(cfg);
    for (const Complex& t : scales.values()) {
      if (t.is_zero()) continue;
      for (const Complex& l : leads) distinct.insert(t * l);
    }
    total += distinct.size();
  }
  return total;
}

template <bool Exact>
std::size_t tensor_node_count(std::span<const Diagram> factors) {
  if (factors.empty()) throw std::invalid_argument("tensor node prediction needs a factor");
  Manager& m = factors.front().manager();
  const PrecisionConfig cfg = m.precision();

  ValueSet prefix(cfg);
  for (const Complex& v : m.terminal_values(factors.front())) prefix.insert(v);
  std::size_t total = m.node_stats(factors.front()).internal_count;

  for (std::size_t i = 1; i < factors.size(); ++i) {
    m.check_owned(factors[i]);
    if constexpr (Exact) {
      total += scaled_copies(m, factors[i], prefix, cfg);
    } else {
      total += m.node_stats(factors[i]).internal_count * prefix.nonzero();
    }
    prefix = product_set(prefix, m.terminal_values(factors[i]), cfg);
  }
  return total + prefix.size();
}

}  // namespace

std::size_t tensor_size_formula(std::span<const Diagram> factors) {
  return tensor_node_count<false>(factors);
}

std::size_t predicted_tensor_nodes(std::span<const Diagram> factors) {
  return tensor_node_count<true>(factors);
}

}  // namespace quidd
