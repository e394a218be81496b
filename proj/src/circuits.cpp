#include "quidd/circuits.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "quidd/errors.hpp"
#include "quidd/persistence.hpp"

namespace quidd {

namespace {

using cd = std::complex<double>;

bool one_qubit_kind(GateKind k) {
  return k == GateKind::hadamard || k == GateKind::pauli_x || k == GateKind::pauli_y ||
         k == GateKind::pauli_z || k == GateKind::identity;
}

// Row-major 2x2 matrix of a one-qubit kind (cnot family -> X).
std::array<cd, 4> dense_2x2(GateKind k) {
  const double h = 1.0 / std::sqrt(2.0);
  switch (k) {
    case GateKind::hadamard: return {cd(h), cd(h), cd(h), cd(-h)};
    case GateKind::pauli_x:
    case GateKind::cnot:
    case GateKind::mcnot:
    case GateKind::oracle: return {cd(0), cd(1), cd(1), cd(0)};
    case GateKind::pauli_y: return {cd(0), cd(0, -1), cd(0, 1), cd(0)};
    case GateKind::pauli_z: return {cd(1), cd(0), cd(0), cd(-1)};
    default: return {cd(1), cd(0), cd(0), cd(1)};
  }
}

// Same at the manager's precision. Only H needs more than a double.
std::array<Complex, 4> exact_2x2(Manager& m, GateKind k) {
  const unsigned bits = m.bits();
  if (k == GateKind::hadamard) {
    const Real h = inv_sqrt2_pow(1, bits);
    const Real zero(0.0, bits);
    return {Complex(h, zero), Complex(h, zero), Complex(h, zero), Complex(-h, zero)};
  }
  const auto d = dense_2x2(k);
  return {Complex(d[0], bits), Complex(d[1], bits), Complex(d[2], bits), Complex(d[3], bits)};
}

// Node over Row(q)/Col(q) with the four blocks of a 2x2 partition.
NodeRef block(Manager& m, std::uint32_t q, NodeRef b00, NodeRef b01, NodeRef b10, NodeRef b11) {
  return m.internal_ref(2 * q, m.internal_ref(2 * q + 1, b11, b10), m.internal_ref(2 * q + 1, b01, b00));
}

NodeRef scale(Manager& m, const Complex& c, NodeRef d) {
  return m.apply_ref(m.terminal_ref(c), d, ops::multiply());
}

// Controls and targets of the cnot family and of the oracle, normalized.
struct ControlledForm {
  std::vector<Control> controls;
  std::vector<std::uint32_t> targets;
  GateKind action;
};

ControlledForm controlled_form(const Gate& g, std::uint32_t width) {
  if (g.kind == GateKind::oracle) {
    ControlledForm f{{}, {width - 1}, GateKind::pauli_x};
    for (std::uint32_t q = 0; q < g.pattern.size(); ++q) {
      if (g.pattern[q] == '1') f.controls.push_back({q, true});
      if (g.pattern[q] == '0') f.controls.push_back({q, false});
    }
    return f;
  }
  if (g.kind == GateKind::cnot || g.kind == GateKind::mcnot) {
    return {g.controls, g.targets, GateKind::pauli_x};
  }
  return {g.controls, g.targets, g.kind};
}

// Bottom-up block construction. Below the target, `proj` is the projector
// onto "all lower controls satisfied". From the target upward, `full` is the
// operator on the suffix given that every control above is satisfied.
NodeRef controlled_operator(Manager& m, const ControlledForm& f, std::uint32_t width) {
  const auto u = exact_2x2(m, f.action);
  std::vector<int> role(width, 0);  // 0 none, 1 target, 2 control on |1>, 3 control on |0>
  for (std::uint32_t t : f.targets) role[t] = 1;
  for (const Control& c : f.controls) role[c.qubit] = c.positive ? 2 : 3;

  const NodeRef z = m.zero_ref();
  NodeRef idle = m.one_ref();
  NodeRef proj = m.one_ref();
  std::optional<NodeRef> full;
  for (std::uint32_t q = width; q-- > 0;) {
    if (role[q] == 1) {
      if (!full) {
        if (proj == idle) {
          full = block(m, q, scale(m, u[0], idle), scale(m, u[1], idle), scale(m, u[2], idle),
                       scale(m, u[3], idle));
        } else {
          const NodeRef rest = m.apply_ref(idle, proj, ops::subtract());
          const auto diag = [&](const Complex& c) { return m.apply_ref(scale(m, c, proj), rest, ops::add()); };
          full = block(m, q, diag(u[0]), scale(m, u[1], proj), scale(m, u[2], proj), diag(u[3]));
        }
      } else {
        full = block(m, q, scale(m, u[0], *full), scale(m, u[1], *full), scale(m, u[2], *full),
                     scale(m, u[3], *full));
      }
    } else if (role[q] >= 2) {
      const bool on_one = role[q] == 2;
      if (!full) {
        proj = on_one ? block(m, q, z, z, z, proj) : block(m, q, proj, z, z, z);
      } else {
        full = on_one ? block(m, q, idle, z, z, *full) : block(m, q, *full, z, z, idle);
      }
    } else {
      if (!full) {
        proj = block(m, q, proj, z, z, proj);
      } else {
        full = block(m, q, *full, z, z, *full);
      }
    }
    idle = block(m, q, idle, z, z, idle);
  }
  return full ? *full : idle;
}

// Sum over U_ij |i><j| on the targets, identity elsewhere.
NodeRef custom_operator(Manager& m, const Gate& g, std::uint32_t width) {
  const std::size_t k = g.targets.size();
  const std::size_t dim = std::size_t{1} << k;
  std::vector<int> slot(width, -1);
  for (std::size_t i = 0; i < k; ++i) slot[g.targets[i]] = static_cast<int>(i);
  const NodeRef z = m.zero_ref();
  NodeRef sum = z;
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c) {
      const cd entry = g.matrix[r * dim + c];
      if (entry == cd(0)) continue;
      NodeRef term = m.terminal_ref(Complex(entry, m.bits()));
      for (std::uint32_t q = width; q-- > 0;) {
        if (slot[q] < 0) {
          term = block(m, q, term, z, z, term);
          continue;
        }
        const std::size_t shift = k - 1 - static_cast<std::size_t>(slot[q]);
        const bool rb = (r >> shift) & 1u, cb = (c >> shift) & 1u;
        term = block(m, q, !rb && !cb ? term : z, !rb && cb ? term : z, rb && !cb ? term : z,
                     rb && cb ? term : z);
      }
      sum = m.apply_ref(sum, term, ops::add());
    }
  }
  return sum;
}

NodeRef diagonal_ref(Manager& m, const Gate& g, std::uint32_t width) {
  std::vector<std::uint32_t> targets = g.targets;
  std::sort(targets.begin(), targets.end());
  if (g.kind == GateKind::identity) return m.one_ref();
  if (g.kind == GateKind::pauli_z) {
    NodeRef plus = m.one_ref();
    NodeRef minus = m.terminal_ref(Complex(-1.0, 0.0, m.bits()));
    for (auto it = targets.rbegin(); it != targets.rend(); ++it) {
      const NodeRef p = m.internal_ref(2 * *it + 1, minus, plus);
      const NodeRef n = m.internal_ref(2 * *it + 1, plus, minus);
      plus = p;
      minus = n;
    }
    return plus;
  }
  if (g.kind == GateKind::phase_shift) {
    if (targets.empty()) {
      for (std::uint32_t q = 0; q < width; ++q) targets.push_back(q);
    }
    NodeRef v = m.terminal_ref(Complex(-1.0, 0.0, m.bits()));
    for (auto it = targets.rbegin(); it != targets.rend(); ++it) {
      v = m.internal_ref(2 * *it + 1, m.one_ref(), v);
    }
    return v;
  }
  throw std::invalid_argument("not a diagonal gate: " + g.name());
}

std::vector<std::uint32_t> phase_targets(const Gate& g, std::uint32_t width) {
  if (!g.targets.empty()) return g.targets;
  std::vector<std::uint32_t> all(width);
  for (std::uint32_t q = 0; q < width; ++q) all[q] = q;
  return all;
}

}  // namespace

// ---- Gate ----

Gate Gate::single(GateKind kind, std::vector<std::uint32_t> targets) {
  if (!one_qubit_kind(kind)) throw std::invalid_argument("not a one-qubit gate kind");
  Gate g;
  g.kind = kind;
  g.targets = std::move(targets);
  return g;
}

Gate Gate::cnot(std::uint32_t control, std::uint32_t target) {
  Gate g;
  g.kind = GateKind::cnot;
  g.targets = {target};
  g.controls = {{control, true}};
  return g;
}

Gate Gate::mcnot(std::vector<Control> controls, std::uint32_t target) {
  Gate g;
  g.kind = GateKind::mcnot;
  g.targets = {target};
  g.controls = std::move(controls);
  return g;
}

Gate Gate::phase_shift(std::vector<std::uint32_t> targets) {
  Gate g;
  g.kind = GateKind::phase_shift;
  g.targets = std::move(targets);
  return g;
}

Gate Gate::oracle(std::string pattern, std::uint32_t width) {
  Gate g;
  g.kind = GateKind::oracle;
  g.pattern = std::move(pattern);
  if (width > 0) g.targets = {width - 1};
  return g;
}

Gate Gate::custom(std::vector<std::uint32_t> targets, std::vector<std::complex<double>> matrix) {
  Gate g;
  g.kind = GateKind::custom;
  g.targets = std::move(targets);
  g.matrix = std::move(matrix);
  return g;
}

bool Gate::is_diagonal() const {
  return controls.empty() && (kind == GateKind::pauli_z || kind == GateKind::identity ||
                              kind == GateKind::phase_shift);
}

std::string Gate::name() const {
  switch (kind) {
    case GateKind::hadamard: return "h";
    case GateKind::pauli_x: return "x";
    case GateKind::pauli_y: return "y";
    case GateKind::pauli_z: return "z";
    case GateKind::identity: return "i";
    case GateKind::cnot: return "cnot";
    case GateKind::mcnot: return controls.size() == 2 ? "ccnot" : "mcnot";
    case GateKind::phase_shift: return "cps";
    case GateKind::oracle: return "oracle";
    case GateKind::custom: return "u";
  }
  return "?";
}

void validate(const Gate& g, std::uint32_t width) {
  const std::string what = g.name();
  std::vector<bool> used(width, false);
  auto claim = [&](std::uint32_t q) {
    if (q >= width) {
      throw DimensionMismatch(what + ": qubit " + std::to_string(q) + " out of range for width " +
                              std::to_string(width));
    }
    if (used[q]) throw DimensionMismatch(what + ": qubit " + std::to_string(q) + " used twice");
    used[q] = true;
  };
  for (std::uint32_t t : g.targets) claim(t);
  for (const Control& c : g.controls) claim(c.qubit);

  switch (g.kind) {
    case GateKind::hadamard:
    case GateKind::pauli_x:
    case GateKind::pauli_y:
    case GateKind::pauli_z:
    case GateKind::identity:
      if (g.targets.empty()) throw DimensionMismatch(what + ": no target");
      if (!g.controls.empty()) throw DimensionMismatch(what + ": controls are not supported");
      break;
    case GateKind::cnot:
    case GateKind::mcnot:
      if (g.targets.size() != 1 || g.controls.empty()) {
        throw DimensionMismatch(what + ": needs one target and at least one control");
      }
      break;
    case GateKind::phase_shift:
      if (!g.controls.empty()) throw DimensionMismatch("cps: controls are not supported");
      break;
    case GateKind::oracle:
      if (width < 2 || g.pattern.size() != width - 1) {
        throw DimensionMismatch("oracle: pattern length must be width - 1");
      }
      for (char ch : g.pattern) {
        if (ch != '0' && ch != '1' && ch != 'd') throw DimensionMismatch("oracle: pattern must use 0, 1, d");
      }
      if (g.targets != std::vector<std::uint32_t>{width - 1}) {
        throw DimensionMismatch("oracle: target must be the last qubit");
      }
      break;
    case GateKind::custom: {
      const std::size_t k = g.targets.size();
      if (k == 0 || k > kMaxCustomQubits) throw DimensionMismatch("u: 1 to 3 target qubits");
      if (!g.controls.empty()) throw DimensionMismatch("u: controls are not supported");
      const std::size_t dim = std::size_t{1} << k;
      if (g.matrix.size() != dim * dim) {
        throw DimensionMismatch("u: expected " + std::to_string(dim * dim) + " entries, got " +
                                std::to_string(g.matrix.size()));
      }
      break;
    }
  }
}

void validate(const Circuit& c) {
  if (c.width == 0) throw DimensionMismatch("circuit has no qubits");
  if (c.initial_state.size() != c.width) throw DimensionMismatch("initial state length differs from width");
  for (char ch : c.initial_state) {
    if (ch != '0' && ch != '1') throw DimensionMismatch("initial state must be a 0/1 string");
  }
  for (const Gate& g : c.gates) validate(g, c.width);
}

// ---- parser ----

namespace {

struct Token {
  std::string_view text;
  std::size_t column;  // 1-based
};

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    if (line[i] == ' ' || line[i] == '\t' || line[i] == '\r') {
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    out.push_back({line.substr(start, i - start), start + 1});
  }
  return out;
}

class CircuitParser {
 public:
  explicit CircuitParser(std::string_view text) : text_(text) {}

  Circuit parse() {
    std::size_t pos = 0;
    while (pos <= text_.size()) {
      const std::size_t end = std::min(text_.find('\n', pos), text_.size());
      ++line_no_;
      std::string_view line = text_.substr(pos, end - pos);
      if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      statement(line);
      pos = end + 1;
    }
    if (!have_width_) throw ParseError(line_no_, 1, "missing 'qubits' declaration");
    if (c_.initial_state.empty()) c_.initial_state.assign(c_.width, '0');
    return std::move(c_);
  }

 private:
  [[noreturn]] void fail(std::size_t column, const std::string& msg) const {
    throw ParseError(line_no_, column, msg);
  }

  std::uint32_t number(const Token& t) const {
    std::uint32_t v = 0;
    const char* first = t.text.data();
    const char* last = first + t.text.size();
    auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || p != last) fail(t.column, "expected a qubit index, got '" + std::string(t.text) + "'");
    return v;
  }

  std::uint32_t qubit(const Token& t) const {
    const std::uint32_t q = number(t);
    if (q >= c_.width) {
      fail(t.column, "qubit " + std::to_string(q) + " out of range for " + std::to_string(c_.width) + " qubits");
    }
    return q;
  }

  Control control(const Token& t) const {
    if (!t.text.empty() && t.text[0] == '!') {
      return {qubit({t.text.substr(1), t.column + 1}), false};
    }
    return {qubit(t), true};
  }

  void distinct(const Gate& g, const std::vector<Token>& toks, std::size_t first) const {
    std::vector<std::uint32_t> seen;
    std::size_t i = first;
    auto check = [&](std::uint32_t q) {
      if (std::find(seen.begin(), seen.end(), q) != seen.end()) {
        fail(toks[std::min(i, toks.size() - 1)].column, "qubit " + std::to_string(q) + " repeated in one gate");
      }
      seen.push_back(q);
      ++i;
    };
    // Token order is controls then target for the cnot family, targets otherwise.
    if (g.kind == GateKind::cnot || g.kind == GateKind::mcnot) {
      for (const Control& c : g.controls) check(c.qubit);
    }
    for (std::uint32_t t : g.targets) check(t);
  }

  void need_width(const Token& t) const {
    if (!have_width_) fail(t.column, "'qubits' must come first");
  }

  void statement(std::string_view line) {
    const std::vector<Token> toks = tokenize(line);
    if (toks.empty()) return;
    const Token& kw = toks[0];
    const std::string_view k = kw.text;

    if (k == "qubits") {
      if (have_width_) fail(kw.column, "duplicate 'qubits' declaration");
      if (toks.size() != 2) fail(kw.column, "usage: qubits <n>");
      c_.width = number(toks[1]);
      if (c_.width == 0) fail(toks[1].column, "need at least one qubit");
      have_width_ = true;
      return;
    }
    need_width(kw);
    if (k == "init") {
      if (toks.size() != 2) fail(kw.column, "usage: init <bitstring>");
      if (!c_.gates.empty()) fail(kw.column, "'init' must precede the gates");
      const Token& b = toks[1];
      if (b.text.size() != c_.width) {
        fail(b.column, "initial state has " + std::to_string(b.text.size()) + " bits, expected " +
                           std::to_string(c_.width));
      }
      for (std::size_t i = 0; i < b.text.size(); ++i) {
        if (b.text[i] != '0' && b.text[i] != '1') fail(b.column + i, "initial state must be 0/1");
      }
      c_.initial_state = std::string(b.text);
      return;
    }

    Gate g;
    if (k == "h" || k == "x" || k == "y" || k == "z" || k == "i") {
      if (toks.size() < 2) fail(kw.column, "missing target qubit");
      const GateKind kinds[] = {GateKind::hadamard, GateKind::pauli_x, GateKind::pauli_y,
                                GateKind::pauli_z, GateKind::identity};
      const std::string_view names[] = {"h", "x", "y", "z", "i"};
      g.kind = kinds[std::find(std::begin(names), std::end(names), k) - std::begin(names)];
      for (std::size_t i = 1; i < toks.size(); ++i) g.targets.push_back(qubit(toks[i]));
    } else if (k == "cnot" || k == "ccnot" || k == "mcnot") {
      const std::size_t want = k == "cnot" ? 3 : k == "ccnot" ? 4 : 0;
      if ((want && toks.size() != want) || (!want && toks.size() < 3)) {
        fail(kw.column, k == "cnot"    ? "usage: cnot <control> <target>"
                        : k == "ccnot" ? "usage: ccnot <c1> <c2> <target>"
                                       : "usage: mcnot <c1> ... <ck> <target>");
      }
      g.kind = k == "cnot" ? GateKind::cnot : GateKind::mcnot;
      for (std::size_t i = 1; i + 1 < toks.size(); ++i) g.controls.push_back(control(toks[i]));
      g.targets.push_back(qubit(toks.back()));
    } else if (k == "cps") {
      g.kind = GateKind::phase_shift;
      for (std::size_t i = 1; i < toks.size(); ++i) g.targets.push_back(qubit(toks[i]));
    } else if (k == "oracle") {
      if (toks.size() != 2) fail(kw.column, "usage: oracle <pattern>");
      const Token& p = toks[1];
      if (c_.width < 2) fail(kw.column, "oracle needs at least two qubits");
      if (p.text.size() != c_.width - 1) {
        fail(p.column, "pattern has " + std::to_string(p.text.size()) + " symbols, expected " +
                           std::to_string(c_.width - 1));
      }
      for (std::size_t i = 0; i < p.text.size(); ++i) {
        const char ch = p.text[i];
        if (ch != '0' && ch != '1' && ch != 'd') fail(p.column + i, "pattern symbols are 0, 1 and d");
      }
      g = Gate::oracle(std::string(p.text), c_.width);
    } else if (k == "u") {
      custom(line, toks, g);
    } else {
      fail(kw.column, "unknown statement '" + std::string(k) + "'");
    }
    distinct(g, toks, 1);
    c_.gates.push_back(std::move(g));
  }

  // u <q1> [<q2> [<q3>]] = <entries, row-major, comma separated>
  void custom(std::string_view line, const std::vector<Token>& toks, Gate& g) const {
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) fail(toks[0].column, "usage: u <q1> [q2 [q3]] = <entries>");
    g.kind = GateKind::custom;
    for (std::size_t i = 1; i < toks.size() && toks[i].column <= eq; ++i) {
      if (toks[i].text == "=") break;
      g.targets.push_back(qubit(toks[i]));
    }
    if (g.targets.empty() || g.targets.size() > kMaxCustomQubits) {
      fail(toks[0].column, "u takes 1 to " + std::to_string(kMaxCustomQubits) + " target qubits");
    }
    try {
      g.matrix = persist::parse_complex_list(line.substr(eq + 1), line_no_);
    } catch (const ParseError& e) {
      throw ParseError(line_no_, e.column() + eq + 1, e.message());
    }
    const std::size_t dim = std::size_t{1} << g.targets.size();
    if (g.matrix.size() != dim * dim) {
      fail(eq + 2, "expected " + std::to_string(dim * dim) + " matrix entries, got " +
                       std::to_string(g.matrix.size()));
    }
  }

  std::string_view text_;
  std::size_t line_no_ = 0;
  bool have_width_ = false;
  Circuit c_;
};

}  // namespace

Circuit parse_circuit(std::string_view text) { return CircuitParser(text).parse(); }

// ---- operators ----

QuiddMatrix gate_operator(Manager& m, const Gate& g, std::uint32_t width) {
  validate(g, width);
  m.maybe_collect();
  NodeRef root;
  if (g.kind == GateKind::custom) {
    root = custom_operator(m, g, width);
  } else if (g.kind == GateKind::phase_shift) {
    const QuiddMatrix id = identity(m, width);
    root = m.apply_ref(id.handle.root(), diagonal_ref(m, g, width), ops::multiply());
  } else {
    root = controlled_operator(m, controlled_form(g, width), width);
  }
  return {m.wrap(root), width};
}

QuiddVector diagonal_operator(Manager& m, const Gate& g, std::uint32_t width) {
  validate(g, width);
  m.maybe_collect();
  return {m.wrap(diagonal_ref(m, g, width)), width};
}

QuiddMatrix hadamard_wall(Manager& m, std::uint32_t width, std::uint32_t first, std::uint32_t count) {
  std::vector<std::uint32_t> targets(count);
  for (std::uint32_t i = 0; i < count; ++i) targets[i] = first + i;
  if (targets.empty()) return identity(m, width);
  return gate_operator(m, Gate::single(GateKind::hadamard, std::move(targets)), width);
}

std::vector<Gate> phase_shift_decomposition(const std::vector<std::uint32_t>& targets) {
  if (targets.empty()) throw std::invalid_argument("phase shift needs at least one qubit");
  const std::uint32_t last = targets.back();
  std::vector<Gate> out;
  out.push_back(Gate::single(GateKind::pauli_x, targets));
  out.push_back(Gate::single(GateKind::hadamard, {last}));
  if (targets.size() == 1) {
    out.push_back(Gate::single(GateKind::pauli_x, {last}));
  } else {
    std::vector<Control> controls;
    for (std::size_t i = 0; i + 1 < targets.size(); ++i) controls.push_back({targets[i], true});
    out.push_back(Gate::mcnot(std::move(controls), last));
  }
  out.push_back(Gate::single(GateKind::hadamard, {last}));
  out.push_back(Gate::single(GateKind::pauli_x, targets));
  return out;
}

QuiddVector apply_gate(const QuiddVector& state, const Gate& g) {
  Manager& m = state.handle.manager();
  if (g.is_diagonal()) return elementwise_mul(diagonal_operator(m, g, state.qubits), state);
  return matmul(gate_operator(m, g, state.qubits), state);
}

QuiddVector run(Manager& m, const Circuit& c) {
  validate(c);
  QuiddVector state = basis_state(m, c.initial_state);
  for (const Gate& g : c.gates) state = apply_gate(state, g);
  return state;
}

// ---- dense reference ----

namespace {

std::uint64_t mask_of(std::uint32_t width, std::uint32_t q) { return std::uint64_t{1} << (width - 1 - q); }

void dense_controlled(DenseState& s, std::uint32_t width, const std::array<cd, 4>& u,
                      std::uint32_t target, const std::vector<Control>& controls) {
  const std::uint64_t tm = mask_of(width, target);
  std::uint64_t need = 0, value = 0;
  for (const Control& c : controls) {
    need |= mask_of(width, c.qubit);
    if (c.positive) value |= mask_of(width, c.qubit);
  }
  for (std::uint64_t i = 0; i < s.size(); ++i) {
    if ((i & tm) || (i & need) != value) continue;
    const cd a0 = s[i], a1 = s[i | tm];
    s[i] = u[0] * a0 + u[1] * a1;
    s[i | tm] = u[2] * a0 + u[3] * a1;
  }
}

}  // namespace

void dense_apply(DenseState& s, std::uint32_t width, const Gate& g) {
  validate(g, width);
  if (s.size() != (std::uint64_t{1} << width)) throw DimensionMismatch("dense state size differs from width");
  switch (g.kind) {
    case GateKind::phase_shift: {
      std::uint64_t need = 0;
      for (std::uint32_t q : phase_targets(g, width)) need |= mask_of(width, q);
      for (std::uint64_t i = 0; i < s.size(); ++i) {
        if ((i & need) == 0) s[i] = -s[i];
      }
      return;
    }
    case GateKind::custom: {
      const std::size_t k = g.targets.size(), dim = std::size_t{1} << k;
      std::uint64_t tmask = 0;
      std::vector<std::uint64_t> offset(dim, 0);
      for (std::size_t j = 0; j < k; ++j) tmask |= mask_of(width, g.targets[j]);
      for (std::size_t l = 0; l < dim; ++l) {
        for (std::size_t j = 0; j < k; ++j) {
          if ((l >> (k - 1 - j)) & 1u) offset[l] |= mask_of(width, g.targets[j]);
        }
      }
      std::vector<cd> in(dim);
      for (std::uint64_t base = 0; base < s.size(); ++base) {
        if (base & tmask) continue;
        for (std::size_t l = 0; l < dim; ++l) in[l] = s[base | offset[l]];
        for (std::size_t r = 0; r < dim; ++r) {
          cd acc = 0;
          for (std::size_t c = 0; c < dim; ++c) acc += g.matrix[r * dim + c] * in[c];
          s[base | offset[r]] = acc;
        }
      }
      return;
    }
    default: {
      const ControlledForm f = controlled_form(g, width);
      const auto u = dense_2x2(f.action);
      for (std::uint32_t t : f.targets) dense_controlled(s, width, u, t, f.controls);
    }
  }
}

DenseState dense_simulate(const Circuit& c) {
  if (c.width > kDenseSimulationCap) {
    throw DimensionMismatch("dense simulation is capped at " + std::to_string(kDenseSimulationCap) + " qubits");
  }
  validate(c);
  DenseState s(std::size_t{1} << c.width, 0.0);
  std::uint64_t index = 0;
  for (char ch : c.initial_state) index = (index << 1) | (ch == '1' ? 1u : 0u);
  s[index] = 1.0;
  for (const Gate& g : c.gates) dense_apply(s, c.width, g);
  return s;
}

// ---- random circuits ----

namespace {

std::vector<std::uint32_t> distinct_qubits(std::uint32_t width, std::size_t k, std::mt19937_64& rng) {
  std::vector<std::uint32_t> all(width);
  std::iota(all.begin(), all.end(), 0u);
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(std::min<std::size_t>(k, width));
  return all;
}

}  // namespace

std::vector<std::complex<double>> random_unitary(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<std::vector<cd>> cols(dim, std::vector<cd>(dim));
  for (auto& col : cols)
    for (auto& x : col) x = {g(rng), g(rng)};
  // Gram-Schmidt on the columns.
  for (std::size_t j = 0; j < dim; ++j) {
    for (std::size_t k = 0; k < j; ++k) {
      cd p = 0;
      for (std::size_t i = 0; i < dim; ++i) p += std::conj(cols[k][i]) * cols[j][i];
      for (std::size_t i = 0; i < dim; ++i) cols[j][i] -= p * cols[k][i];
    }
    double n = 0;
    for (const cd& x : cols[j]) n += std::norm(x);
    for (cd& x : cols[j]) x /= std::sqrt(n);
  }
  std::vector<cd> m(dim * dim);
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) m[r * dim + c] = cols[c][r];
  return m;
}

Gate random_gate(std::uint32_t width, std::mt19937_64& rng) {
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  for (;;) {
    switch (pick(10)) {
      case 0: return Gate::single(GateKind::hadamard, distinct_qubits(width, 1 + pick(width), rng));
      case 1: return Gate::single(GateKind::pauli_x, distinct_qubits(width, 1 + pick(width), rng));
      case 2: return Gate::single(GateKind::pauli_y, distinct_qubits(width, 1 + pick(2), rng));
      case 3: return Gate::single(GateKind::pauli_z, distinct_qubits(width, 1 + pick(width), rng));
      case 4: return Gate::single(GateKind::identity, distinct_qubits(width, 1, rng));
      case 5:
        if (width >= 2) {
          auto q = distinct_qubits(width, 2, rng);
          return Gate::cnot(q[0], q[1]);
        }
        break;
      case 6:
        if (width >= 2) {
          const std::size_t k = 1 + pick(width - 1);
          auto q = distinct_qubits(width, k + 1, rng);
          std::vector<Control> controls;
          for (std::size_t i = 0; i < k; ++i) controls.push_back({q[i], pick(3) != 0});
          return Gate::mcnot(std::move(controls), q[k]);
        }
        break;
      case 7: return Gate::phase_shift(pick(3) == 0 ? std::vector<std::uint32_t>{}
                                                    : distinct_qubits(width, 1 + pick(width), rng));
      case 8:
        if (width >= 2) {
          std::string p(width - 1, 'd');
          for (char& ch : p) ch = "01d"[pick(3)];
          return Gate::oracle(p, width);
        }
        break;
      case 9: {
        const std::size_t k = 1 + pick(std::min<std::size_t>(width, kMaxCustomQubits));
        return Gate::custom(distinct_qubits(width, k, rng), random_unitary(std::size_t{1} << k, rng));
      }
    }
  }
}

Circuit random_circuit(std::uint32_t width, std::size_t depth, std::mt19937_64& rng) {
  Circuit c;
  c.width = width;
  c.initial_state.resize(width);
  for (char& ch : c.initial_state) ch = std::uniform_int_distribution<int>(0, 1)(rng) ? '1' : '0';
  for (std::size_t i = 0; i < depth; ++i) c.gates.push_back(random_gate(width, rng));
  return c;
}

// ---- inverse QFT ----

QuiddMatrix build_inverse_qft(Manager& m, std::uint32_t n) {
  if (n == 0) throw std::invalid_argument("inverse QFT needs at least one qubit");
  if (n > 12) throw DimensionMismatch("inverse QFT demo is limited to 12 qubits");
  const long dim = 1L << n;
  const Real norm = inv_sqrt2_pow(n, m.bits());
  std::vector<Complex> entry;
  entry.reserve(dim);
  for (long k = 0; k < dim; ++k) entry.push_back(root_of_unity(-k, dim, m.bits()) * norm);
  return matrix_from_function(m, n, [&](std::uint64_t r, std::uint64_t c) {
    return entry[(r * c) % static_cast<std::uint64_t>(dim)];
  });
}

}  // namespace quidd
