#include <gtest/gtest.h>

#include <cmath>

#include "dense_oracle.hpp"
#include "quidd/circuits.hpp"
#include "quidd/errors.hpp"
#include "random_circuit.hpp"

using namespace quidd;
using dense::cx;
using testing_support::random_circuit;
using testing_support::reference_matrix;

namespace {

const double kR = 1.0 / std::sqrt(2.0);

void expect_state(const std::vector<cx>& got, const std::vector<cx>& want, double tol) {
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    EXPECT_NEAR(std::abs(got[i] - want[i]), 0.0, tol) << "amplitude " << i;
  }
}

std::size_t ctor_count(const char* text) { return parse_circuit(text).gates.size(); }

template <class F>
void expect_parse_error(const char* text, std::size_t line, std::size_t column, F&& check_message) {
  try {
    parse_circuit(text);
    FAIL() << "no error for: " << text;
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), line) << e.what();
    EXPECT_EQ(e.column(), column) << e.what();
    check_message(std::string(e.message()));
  }
}

}  // namespace

TEST(ParseCircuit, Examples) {
  Circuit bell = parse_circuit("qubits 2\ninit 00\nh 0\ncnot 0 1");
  EXPECT_EQ(bell.width, 2u);
  EXPECT_EQ(bell.initial_state, "00");
  ASSERT_EQ(bell.gates.size(), 2u);
  EXPECT_EQ(bell.gates[0].kind, GateKind::hadamard);
  EXPECT_EQ(bell.gates[1].kind, GateKind::cnot);
  EXPECT_EQ(bell.gates[1].controls, (std::vector<Control>{{0, true}}));
  EXPECT_EQ(bell.gates[1].targets, std::vector<std::uint32_t>{1});

  Manager m;
  Circuit hh = parse_circuit("qubits 1\ninit 0\nh 0\nh 0");
  expect_state(to_dense(run(m, hh)), {1.0, 0.0}, 1e-30);

  expect_parse_error("qubits 2\nh 5", 2, 3, [](const std::string& msg) {
    EXPECT_NE(msg.find("out of range"), std::string::npos);
  });
}

TEST(ParseCircuit, FullGrammar) {
  const char* text =
      "# comment line\n"
      "qubits 4   # trailing comment\n"
      "init 0101\n"
      "\n"
      "h 0 1 2\n"
      "x 3\ny 1\nz 0 2\ni 3\n"
      "ccnot 0 1 3\n"
      "mcnot 0 !1 2 3\n"
      "cps\n"
      "cps 1 2\n"
      "oracle 1d0\n"
      "u 2 0 = 0, 1, 1, 0, 0.5, 0.5i, -1/2, 1e-1, 0, 0, 1, 0, 1, 0, 0, 0\n";
  Circuit c = parse_circuit(text);
  EXPECT_EQ(c.width, 4u);
  EXPECT_EQ(c.initial_state, "0101");
  ASSERT_EQ(c.gates.size(), 11u);
  EXPECT_EQ(c.gates[0].targets, (std::vector<std::uint32_t>{0, 1, 2}));
  EXPECT_EQ(c.gates[5].kind, GateKind::mcnot);
  EXPECT_EQ(c.gates[5].controls.size(), 2u);
  EXPECT_EQ(c.gates[6].controls, (std::vector<Control>{{0, true}, {1, false}, {2, true}}));
  EXPECT_TRUE(c.gates[7].targets.empty());
  EXPECT_EQ(c.gates[8].targets, (std::vector<std::uint32_t>{1, 2}));
  EXPECT_EQ(c.gates[9].pattern, "1d0");
  EXPECT_EQ(c.gates[9].targets, std::vector<std::uint32_t>{3});
  const Gate& u = c.gates[10];
  EXPECT_EQ(u.targets, (std::vector<std::uint32_t>{2, 0}));
  ASSERT_EQ(u.matrix.size(), 16u);
  EXPECT_EQ(u.matrix[5], cx(0, 0.5));
  EXPECT_EQ(u.matrix[6], cx(-0.5));
  EXPECT_NEAR(u.matrix[7].real(), 0.1, 1e-15);

  EXPECT_EQ(parse_circuit("qubits 3").initial_state, "000");
  EXPECT_EQ(ctor_count("qubits 1\r\nh 0\r\n"), 1u);
}

TEST(ParseCircuit, Errors) {
  auto any = [](const std::string&) {};
  auto has = [](const char* needle) {
    return [needle](const std::string& msg) { EXPECT_NE(msg.find(needle), std::string::npos) << msg; };
  };
  expect_parse_error("h 0", 1, 1, has("'qubits' must come first"));
  expect_parse_error("", 1, 1, has("missing 'qubits'"));
  expect_parse_error("qubits 2\nqubits 3", 2, 1, has("duplicate"));
  expect_parse_error("qubits 0", 1, 8, any);
  expect_parse_error("qubits 2\ninit 0", 2, 6, has("expected 2"));
  expect_parse_error("qubits 2\ninit 0a", 2, 7, any);
  expect_parse_error("qubits 2\nh 0\ninit 00", 3, 1, has("precede"));
  expect_parse_error("qubits 2\ncnot 1 1", 2, 8, has("repeated"));
  expect_parse_error("qubits 3\nh 0 2 0", 2, 7, has("repeated"));
  expect_parse_error("qubits 2\ncnot 0", 2, 1, has("usage"));
  expect_parse_error("qubits 3\nccnot 0 1", 2, 1, has("usage"));
  expect_parse_error("qubits 2\n  foo 1", 2, 3, has("unknown"));
  expect_parse_error("qubits 2\nh x", 2, 3, has("qubit index"));
  expect_parse_error("qubits 2\nh -1", 2, 3, any);
  expect_parse_error("qubits 3\ncnot !x 1", 2, 7, any);
  expect_parse_error("qubits 3\noracle 1", 2, 8, has("expected 2"));
  expect_parse_error("qubits 3\noracle 1x", 2, 9, has("0, 1 and d"));
  expect_parse_error("qubits 1\noracle ", 2, 1, any);
  expect_parse_error("qubits 2\nu 0 1", 2, 1, has("usage"));
  expect_parse_error("qubits 2\nu 0 = 1, 0, 0", 2, 6, has("expected 4"));
  expect_parse_error("qubits 2\nu 0 = 1, 0, 0, q", 2, 16, any);
  expect_parse_error("qubits 4\nu 0 1 2 3 = 1", 2, 1, has("1 to 3"));
}

TEST(Validate, Gates) {
  EXPECT_THROW(validate(Gate::cnot(0, 0), 2), DimensionMismatch);
  EXPECT_THROW(validate(Gate::cnot(0, 2), 2), DimensionMismatch);
  EXPECT_THROW(validate(Gate::single(GateKind::hadamard, {}), 2), DimensionMismatch);
  EXPECT_THROW(validate(Gate::oracle("11", 2), 2), DimensionMismatch);
  EXPECT_THROW(validate(Gate::custom({0}, {1, 0, 0}), 2), DimensionMismatch);
  EXPECT_THROW(Gate::single(GateKind::cnot, {0}), std::invalid_argument);
  EXPECT_NO_THROW(validate(Gate::oracle("1", 2), 2));
  Circuit c{2, "0", {}};
  EXPECT_THROW(validate(c), DimensionMismatch);
}

TEST(GateOperator, HadamardOnQubit2Of5) {
  Manager m;
  const QuiddMatrix h2 = gate_operator(m, Gate::single(GateKind::hadamard, {2}), 5);
  const auto out = to_dense(matmul(h2, basis_state(m, "00100")));
  std::vector<cx> want(32, 0.0);
  want[0b00000] = kR;
  want[0b00100] = -kR;
  expect_state(out, want, 1e-15);
}

TEST(GateOperator, ConditionalPhaseShift3) {
  Manager m;
  const auto d = to_dense(gate_operator(m, Gate::phase_shift({}), 3));
  for (std::size_t r = 0; r < 8; ++r)
    for (std::size_t c = 0; c < 8; ++c)
      EXPECT_EQ(d[r * 8 + c], r != c ? cx(0) : cx(r == 0 ? -1.0 : 1.0));
  // Vector form: n internal nodes on the column chain plus terminals 1 and -1.
  const QuiddVector v = diagonal_operator(m, Gate::phase_shift({}), 3);
  EXPECT_EQ(stats(v).total, 5u);
}

TEST(GateOperator, IdentityIsNeutral) {
  Manager m;
  const QuiddMatrix id = gate_operator(m, Gate::single(GateKind::identity, {1}), 3);
  EXPECT_EQ(id.handle, identity(m, 3).handle);
  EXPECT_TRUE(diagonal_operator(m, Gate::single(GateKind::identity, {1}), 3).handle == m.one());
  std::mt19937_64 rng(5);
  std::vector<cx> amp(8);
  for (auto& a : amp) a = dense::random_entry(rng);
  const QuiddVector v = vector_from_dense(m, 3, amp);
  EXPECT_EQ(matmul(id, v).handle, v.handle);
}

TEST(GateOperator, MatchesDefinitionForEveryKind) {
  std::mt19937_64 rng(11);
  Manager m;
  for (int trial = 0; trial < 300; ++trial) {
    const std::uint32_t width = 1 + trial % 5;
    const Gate g = testing_support::random_gate(width, rng);
    const auto got = to_dense(gate_operator(m, g, width));
    const auto want = reference_matrix(g, width);
    EXPECT_LT(dense::max_diff(got, want.a), 1e-14) << g.name() << " width " << width;
  }
}

TEST(GateOperator, CanonicalAcrossCalls) {
  Manager m;
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const Gate g = testing_support::random_gate(5, rng);
    const QuiddMatrix a = gate_operator(m, g, 5);
    m.collect();
    const QuiddMatrix b = gate_operator(m, g, 5);
    EXPECT_EQ(a.handle, b.handle) << g.name();
    EXPECT_TRUE(m.audit(a.handle));
  }
}

TEST(GateOperator, HadamardWallTerminals) {
  Manager m;
  for (std::uint32_t n = 1; n <= 12; ++n) {
    const QuiddMatrix w = hadamard_wall(m, n, 0, n);
    const auto t = m.terminal_values(w.handle);
    ASSERT_EQ(t.size(), 2u) << n;
    const Real mag = inv_sqrt2_pow(n, m.bits());
    const Complex plus(mag, Real(0.0, m.bits())), minus(-mag, Real(0.0, m.bits()));
    EXPECT_TRUE((t[0] == plus && t[1] == minus) || (t[0] == minus && t[1] == plus)) << n;
    // One row and one column node per qubit on each sign branch after the first.
    EXPECT_EQ(stats(w).total, 3 * n + 2 - 1 + (n > 1 ? n - 1 : 0)) << n;
  }
}

TEST(GateOperator, PhaseShiftDecompositionAgrees) {
  Manager m;
  for (std::uint32_t width = 1; width <= 6; ++width) {
    std::mt19937_64 rng(width);
    for (int trial = 0; trial < 4; ++trial) {
      const auto targets = testing_support::distinct_qubits(width, 1 + trial % width, rng);
      QuiddMatrix product = identity(m, width);
      for (const Gate& g : phase_shift_decomposition(targets)) product = matmul(gate_operator(m, g, width), product);
      EXPECT_EQ(product.handle, gate_operator(m, Gate::phase_shift(targets), width).handle) << width;
    }
  }
}

TEST(ApplyGate, Examples) {
  Manager m;
  expect_state(to_dense(apply_gate(basis_state(m, "0"), Gate::single(GateKind::hadamard, {0}))), {kR, kR}, 1e-15);

  const QuiddVector plus2 = apply_gate(basis_state(m, "00"), Gate::single(GateKind::hadamard, {0, 1}));
  expect_state(to_dense(apply_gate(plus2, Gate::phase_shift({}))), {-0.5, 0.5, 0.5, 0.5}, 1e-15);
  // Same through the dense simulator.
  dense::Vec ref = {0.5, 0.5, 0.5, 0.5};
  dense_apply(ref, 2, Gate::phase_shift({}));
  expect_state(to_dense(apply_gate(plus2, Gate::phase_shift({}))), ref, 1e-15);

  EXPECT_EQ(apply_gate(basis_state(m, "10"), Gate::cnot(0, 1)).handle, basis_state(m, "11").handle);
  EXPECT_THROW(apply_gate(basis_state(m, "10"), Gate::cnot(0, 2)), DimensionMismatch);
}

TEST(ApplyGate, DiagonalPathEqualsMatmul) {
  Manager m;
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<cx> amp(16);
    for (auto& a : amp) a = dense::random_entry(rng);
    const QuiddVector v = vector_from_dense(m, 4, amp);
    const std::vector<Gate> gates = {Gate::phase_shift({}), Gate::phase_shift({2, 0}),
                                     Gate::single(GateKind::pauli_z, {1, 3}), Gate::single(GateKind::identity, {2})};
    for (const Gate& g : gates) {
      ASSERT_TRUE(g.is_diagonal());
      EXPECT_EQ(apply_gate(v, g).handle, matmul(gate_operator(m, g, 4), v).handle);
    }
  }
}

TEST(Run, Examples) {
  Manager m;
  const Circuit bell = parse_circuit("qubits 2\ninit 00\nh 0\ncnot 0 1");
  expect_state(to_dense(run(m, bell)), {kR, 0, 0, kR}, 1e-15);
  expect_state(dense_simulate(bell), {kR, 0, 0, kR}, 1e-15);

  const Circuit empty = parse_circuit("qubits 3\ninit 101");
  EXPECT_EQ(run(m, empty).handle, basis_state(m, "101").handle);

  std::mt19937_64 rng(2024);
  const Circuit c = random_circuit(4, 12, rng);
  expect_state(to_dense(run(m, c)), dense_simulate(c), 1e-10);
}

TEST(DenseSimulate, Examples) {
  const Circuit wall = parse_circuit("qubits 3\nh 0 1 2");
  for (const cx& a : dense_simulate(wall)) EXPECT_NEAR(std::abs(a - cx(std::pow(2.0, -1.5))), 0.0, 1e-15);
  Circuit big;
  big.width = kDenseSimulationCap + 1;
  big.initial_state.assign(big.width, '0');
  EXPECT_THROW(dense_simulate(big), DimensionMismatch);
}

TEST(DenseSimulate, AgreesWithGateMatrices) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    const std::uint32_t width = 1 + trial % 4;
    const Circuit c = random_circuit(width, 8, rng);
    dense::Vec state(std::size_t{1} << width, 0.0);
    state[std::stoull(c.initial_state, nullptr, 2)] = 1.0;
    for (const Gate& g : c.gates) state = dense::mul(reference_matrix(g, width), state);
    const DenseState got = dense_simulate(c);
    EXPECT_LT(dense::max_diff(got, state), 1e-12);
    double norm = 0;
    for (const cx& a : got) norm += std::norm(a);
    EXPECT_NEAR(norm, 1.0, 1e-9);
  }
}

// 200 random circuits over the whole gate library, width <= 6, depth <= 20.
TEST(Invariants, MasterEquivalenceAndUnitarity) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::uint32_t width = 1 + trial % 6;
    const std::size_t depth = std::uniform_int_distribution<std::size_t>(0, 20)(rng);
    const Circuit c = random_circuit(width, depth, rng);
    Manager m;
    const QuiddVector out = run(m, c);
    EXPECT_LT(dense::max_diff(to_dense(out), dense_simulate(c)), 1e-10) << trial;
    EXPECT_NEAR(inner_product(out, out).to_std().real(), 1.0, 1e-9);
    EXPECT_NEAR(inner_product(out, out).to_std().imag(), 0.0, 1e-9);
  }
}

TEST(InverseQft, Examples) {
  Manager m;
  const QuiddMatrix q1 = build_inverse_qft(m, 1);
  EXPECT_EQ(q1.handle, gate_operator(m, Gate::single(GateKind::hadamard, {0}), 1).handle);

  const QuiddMatrix q2 = build_inverse_qft(m, 2);
  const auto d = to_dense(q2);
  const cx w(0, -1);  // e^{-2 pi i / 4}
  for (std::uint64_t j = 0; j < 4; ++j) {
    for (std::uint64_t k = 0; k < 4; ++k) EXPECT_LT(std::abs(d[j * 4 + k] - std::pow(w, double(j * k)) / 2.0), 1e-15);
    // Columns against basis states match the dense DFT.
    std::vector<cx> col(4);
    for (std::uint64_t r = 0; r < 4; ++r) col[r] = std::exp(cx(0, -2 * M_PI * double(r * j) / 4)) / 2.0;
    expect_state(to_dense(matmul(q2, basis_state(m, 2, j))), col, 1e-12);
  }
  EXPECT_THROW(build_inverse_qft(m, 0), std::invalid_argument);
}

TEST(InverseQft, DenseDftForLargerSizes) {
  Manager m;
  for (std::uint32_t n = 3; n <= 5; ++n) {
    const std::size_t dim = std::size_t{1} << n;
    const auto d = to_dense(build_inverse_qft(m, n));
    double worst = 0;
    for (std::size_t r = 0; r < dim; ++r)
      for (std::size_t c = 0; c < dim; ++c)
        worst = std::max(worst, std::abs(d[r * dim + c] - std::exp(cx(0, -2 * M_PI * double(r * c) / double(dim))) /
                                                              std::sqrt(double(dim))));
    EXPECT_LT(worst, 1e-12) << n;
  }
}

TEST(InverseQft, SuperLinearGrowth) {
  Manager m;
  std::vector<std::size_t> nodes;
  for (std::uint32_t n = 2; n <= 8; ++n) nodes.push_back(stats(build_inverse_qft(m, n)).total);
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    EXPECT_GT(nodes[i], nodes[i - 1]);
    EXPECT_GE(double(nodes[i]) / double(nodes[i - 1]), 1.8) << "n=" << i + 2;
  }
  for (std::size_t i = 2; i < nodes.size(); ++i) EXPECT_GT(nodes[i] - nodes[i - 1], nodes[i - 1] - nodes[i - 2]);
}
