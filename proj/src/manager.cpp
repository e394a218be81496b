#include "quidd/manager.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_set>

namespace quidd {

namespace {

constexpr NodeRef kNone = 0xFFFFFFFFu;
constexpr std::uint32_t kFreeLevel = 0xFFFFFFFEu;

std::uint64_t mix(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

}  // namespace

std::string VariableLabel::name() const {
  return (kind == VarKind::row ? "R" : "C") + std::to_string(qubit);
}

std::size_t CacheKeyHash::operator()(const CacheKey& k) const noexcept {
  std::uint64_t h = mix((static_cast<std::uint64_t>(k.op) << 32) ^ k.extra);
  h = mix(h ^ ((static_cast<std::uint64_t>(k.a) << 32) | k.b));
  return static_cast<std::size_t>(h);
}

std::size_t Manager::NodeKeyHash::operator()(const NodeKey& k) const noexcept {
  std::uint64_t h = mix(k.level);
  h = mix(h ^ ((static_cast<std::uint64_t>(k.hi) << 32) | k.lo));
  return static_cast<std::size_t>(h);
}

namespace ops {

const BinaryOp& add() {
  static const BinaryOp op{[](const Complex& a, const Complex& b) { return a + b; },
                           op_tag::add, true, BinaryOp::Algebra::additive};
  return op;
}

const BinaryOp& subtract() {
  static const BinaryOp op{[](const Complex& a, const Complex& b) { return a - b; },
                           op_tag::subtract, false, BinaryOp::Algebra::none};
  return op;
}

const BinaryOp& multiply() {
  static const BinaryOp op{[](const Complex& a, const Complex& b) { return a * b; },
                           op_tag::multiply, true, BinaryOp::Algebra::multiplicative};
  return op;
}

const UnaryOp& conjugate() {
  static const UnaryOp op{[](const Complex& a) { return a.conj(); }, op_tag::conjugate};
  return op;
}

}  // namespace ops

Manager::Manager(PrecisionConfig cfg) : terminals_(cfg) {
  const unsigned b = terminals_.config().mantissa_bits;
  zero_ = terminal_ref(Complex(b));
  one_ = terminal_ref(Complex(1.0, 0.0, b));
  // Pinned for the manager's lifetime.
  ++ext_refs_[zero_];
  ++ext_refs_[one_];
}

// ---- node construction ----

NodeRef Manager::allocate(const Node& n) {
  NodeRef r;
  if (!free_.empty()) {
    r = free_.back();
    free_.pop_back();
    nodes_[r] = n;
    ext_refs_[r] = 0;
  } else {
    if (nodes_.size() >= kFreeLevel) throw ResourceLimit("node index space exhausted");
    r = static_cast<NodeRef>(nodes_.size());
    nodes_.push_back(n);
    ext_refs_.push_back(0);
  }
  ++created_since_collect_;
  peak_nodes_ = std::max(peak_nodes_, live_nodes());
  return r;
}

NodeRef Manager::terminal_ref(const Complex& v) {
  const std::uint32_t idx = terminals_.intern(v);
  if (idx >= terminal_nodes_.size()) terminal_nodes_.resize(idx + 1, kNone);
  if (terminal_nodes_[idx] == kNone) terminal_nodes_[idx] = allocate({kTerminalLevel, idx, 0});
  return terminal_nodes_[idx];
}

NodeRef Manager::internal_ref(std::uint32_t level, NodeRef then_child, NodeRef else_child) {
  if (then_child == else_child) return then_child;
  if (level >= nodes_[then_child].level || level >= nodes_[else_child].level) {
    throw OrderingError("variable " + VariableLabel::at_level(level).name() +
                        " does not precede its children");
  }
  const NodeKey key{level, then_child, else_child};
  if (auto it = unique_.find(key); it != unique_.end()) return it->second;
  const NodeRef r = allocate({level, then_child, else_child});
  unique_.emplace(key, r);
  return r;
}

// ---- apply ----

NodeRef Manager::apply_rec(NodeRef a, NodeRef b, const BinaryOp& op, LocalCache* local) {
  switch (op.algebra) {
    case BinaryOp::Algebra::multiplicative:
      if (a == zero_ || b == zero_) return zero_;
      if (a == one_) return b;
      if (b == one_) return a;
      break;
    case BinaryOp::Algebra::additive:
      if (a == zero_) return b;
      if (b == zero_) return a;
      break;
    case BinaryOp::Algebra::none:
      break;
  }
  const Node na = nodes_[a];
  const Node nb = nodes_[b];
  if (na.level == kTerminalLevel && nb.level == kTerminalLevel) {
    return terminal_ref(op.fn(terminals_.value(na.hi), terminals_.value(nb.hi)));
  }
  if (op.commutative && a > b) std::swap(a, b);
  const CacheKey key{op.tag.value_or(0), a, b, 0};
  LocalCache& table = local ? *local : cache_;
  if (auto it = table.find(key); it != table.end()) {
    ++counters_.apply_hits;
    return it->second;
  }
  ++counters_.apply_calls;
  const std::uint32_t level = std::min(nodes_[a].level, nodes_[b].level);
  const NodeRef hi = apply_rec(cofactor(a, level, true), cofactor(b, level, true), op, local);
  const NodeRef lo = apply_rec(cofactor(a, level, false), cofactor(b, level, false), op, local);
  const NodeRef r = internal_ref(level, hi, lo);
  table.emplace(key, r);
  return r;
}

NodeRef Manager::apply_ref(NodeRef a, NodeRef b, const BinaryOp& op) {
  if (op.tag) return apply_rec(a, b, op, nullptr);
  LocalCache local;
  return apply_rec(a, b, op, &local);
}

NodeRef Manager::map_rec(NodeRef d, const UnaryOp& op, LocalCache* local) {
  const Node n = nodes_[d];
  if (n.level == kTerminalLevel) return terminal_ref(op.fn(terminals_.value(n.hi)));
  const CacheKey key{op.tag.value_or(0), d, 0, 1};
  LocalCache& table = local ? *local : cache_;
  if (auto it = table.find(key); it != table.end()) return it->second;
  const NodeRef hi = map_rec(n.hi, op, local);
  const NodeRef lo = map_rec(n.lo, op, local);
  const NodeRef r = internal_ref(n.level, hi, lo);
  table.emplace(key, r);
  return r;
}

NodeRef Manager::map_ref(NodeRef d, const UnaryOp& op) {
  if (op.tag) return map_rec(d, op, nullptr);
  LocalCache local;
  return map_rec(d, op, &local);
}

NodeRef Manager::shift_rec(NodeRef d, std::uint32_t level_offset) {
  const Node n = nodes_[d];
  if (n.level == kTerminalLevel) return d;
  const CacheKey key{op_tag::shift, d, 0, level_offset};
  if (auto hit = cache_find(key)) return *hit;
  const NodeRef hi = shift_rec(n.hi, level_offset);
  const NodeRef lo = shift_rec(n.lo, level_offset);
  const NodeRef r = internal_ref(n.level + level_offset, hi, lo);
  cache_put(key, r);
  return r;
}

// ---- handle level ----

void Manager::check_owned(const Diagram& d) const {
  if (!d.valid()) throw Error("use of an empty diagram handle");
  if (&d.manager() != this) throw ManagerMismatch();
}

Diagram Manager::constant(const Complex& value) {
  maybe_collect();
  return wrap(terminal_ref(value));
}

Diagram Manager::constant(double re, double im) { return constant(Complex(re, im, bits())); }

Diagram Manager::make_internal(VariableLabel var, const Diagram& then_child,
                               const Diagram& else_child) {
  check_owned(then_child);
  check_owned(else_child);
  maybe_collect();
  return wrap(internal_ref(var.level(), then_child.root(), else_child.root()));
}

Diagram Manager::apply(const Diagram& a, const Diagram& b, const BinaryOp& op) {
  check_owned(a);
  check_owned(b);
  maybe_collect();
  return wrap(apply_ref(a.root(), b.root(), op));
}

Diagram Manager::map_terminals(const Diagram& d, const UnaryOp& op) {
  check_owned(d);
  maybe_collect();
  return wrap(map_ref(d.root(), op));
}

Diagram Manager::shift_variables(const Diagram& d, std::uint32_t qubit_offset) {
  check_owned(d);
  maybe_collect();
  if (qubit_offset == 0) return d;
  if (auto q = max_qubit(d); q && *q + static_cast<std::uint64_t>(qubit_offset) >= (1u << 30)) {
    throw DimensionMismatch("variable index overflow in shift");
  }
  return wrap(shift_rec(d.root(), 2 * qubit_offset));
}

std::vector<NodeRef> Manager::reachable(NodeRef root) const {
  std::vector<NodeRef> order;
  std::unordered_set<NodeRef> seen;
  std::vector<NodeRef> stack{root};
  seen.insert(root);
  while (!stack.empty()) {
    const NodeRef r = stack.back();
    stack.pop_back();
    order.push_back(r);
    const Node& n = nodes_[r];
    if (n.level == kTerminalLevel) continue;
    for (NodeRef c : {n.hi, n.lo}) {
      if (seen.insert(c).second) stack.push_back(c);
    }
  }
  return order;
}

NodeStats Manager::node_stats(const Diagram& d) const {
  check_owned(d);
  NodeStats s;
  for (NodeRef r : reachable(d.root())) {
    if (is_terminal(r)) {
      ++s.terminal_count;
    } else {
      ++s.internal_count;
    }
  }
  s.total = s.internal_count + s.terminal_count;
  return s;
}

std::vector<NodeRef> Manager::internal_nodes(const Diagram& d) const {
  check_owned(d);
  std::vector<NodeRef> out = reachable(d.root());
  std::erase_if(out, [this](NodeRef r) { return is_terminal(r); });
  std::stable_sort(out.begin(), out.end(),
                   [this](NodeRef a, NodeRef b) { return nodes_[a].level < nodes_[b].level; });
  return out;
}

std::vector<Complex> Manager::terminal_values(const Diagram& d) const {
  check_owned(d);
  std::vector<std::uint32_t> idx;
  for (NodeRef r : reachable(d.root())) {
    if (is_terminal(r)) idx.push_back(nodes_[r].hi);
  }
  std::sort(idx.begin(), idx.end());
  std::vector<Complex> out;
  out.reserve(idx.size());
  for (std::uint32_t i : idx) out.push_back(terminals_.value(i));
  return out;
}

std::optional<std::uint32_t> Manager::max_qubit(const Diagram& d) const {
  check_owned(d);
  std::optional<std::uint32_t> q;
  for (NodeRef r : reachable(d.root())) {
    if (is_terminal(r)) continue;
    const std::uint32_t qr = nodes_[r].level >> 1;
    if (!q || qr > *q) q = qr;
  }
  return q;
}

bool Manager::independent_of(const Diagram& d, VarKind kind) const {
  check_owned(d);
  const std::uint32_t parity = kind == VarKind::col ? 1u : 0u;
  for (NodeRef r : reachable(d.root())) {
    if (!is_terminal(r) && (nodes_[r].level & 1u) == parity) return false;
  }
  return true;
}

Complex Manager::eval(const Diagram& d, std::span<const std::uint8_t> row_bits,
                      std::span<const std::uint8_t> col_bits) const {
  check_owned(d);
  NodeRef r = d.root();
  while (!is_terminal(r)) {
    const Node& n = nodes_[r];
    const std::uint32_t q = n.level >> 1;
    const auto& bits = (n.level & 1u) ? col_bits : row_bits;
    if (q >= bits.size()) {
      throw DimensionMismatch("assignment does not cover " + VariableLabel::at_level(n.level).name());
    }
    r = bits[q] ? n.hi : n.lo;
  }
  return value(r);
}

Complex Manager::eval_index(const Diagram& d, std::uint64_t row, std::uint64_t col,
                            std::uint32_t qubits) const {
  std::vector<std::uint8_t> rb(qubits), cb(qubits);
  for (std::uint32_t q = 0; q < qubits; ++q) {
    const unsigned shift = qubits - 1 - q;
    rb[q] = shift < 64 ? static_cast<std::uint8_t>((row >> shift) & 1u) : 0;
    cb[q] = shift < 64 ? static_cast<std::uint8_t>((col >> shift) & 1u) : 0;
  }
  return eval(d, rb, cb);
}

bool Manager::audit(const Diagram& d) const {
  check_owned(d);
  for (NodeRef r : reachable(d.root())) {
    const Node& n = nodes_[r];
    if (n.level == kFreeLevel) return false;
    if (n.level == kTerminalLevel) {
      if (!terminals_.contains(n.hi) || terminal_nodes_[n.hi] != r) return false;
      continue;
    }
    if (n.hi == n.lo) return false;
    if (n.level >= nodes_[n.hi].level || n.level >= nodes_[n.lo].level) return false;
    auto it = unique_.find({n.level, n.hi, n.lo});
    if (it == unique_.end() || it->second != r) return false;
  }
  return true;
}

std::string Manager::to_dot(const Diagram& d, std::string_view graph_name) const {
  check_owned(d);
  std::ostringstream out;
  out << "digraph " << graph_name << " {\n";
  auto nodes = reachable(d.root());
  std::sort(nodes.begin(), nodes.end());
  for (NodeRef r : nodes) {
    const Node& n = nodes_[r];
    if (n.level == kTerminalLevel) {
      out << "  n" << r << " [shape=box,label=\"" << value(r).to_string(8) << "\"];\n";
    } else {
      out << "  n" << r << " [label=\"" << VariableLabel::at_level(n.level).name() << "\"];\n";
    }
  }
  for (NodeRef r : nodes) {
    const Node& n = nodes_[r];
    if (n.level == kTerminalLevel) continue;
    out << "  n" << r << " -> n" << n.hi << ";\n";
    out << "  n" << r << " -> n" << n.lo << " [style=dashed];\n";
  }
  out << "}\n";
  return out.str();
}

// ---- computed table ----

std::optional<NodeRef> Manager::cache_find(const CacheKey& key) const {
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  return std::nullopt;
}

void Manager::cache_put(const CacheKey& key, NodeRef result) { cache_.insert_or_assign(key, result); }

void Manager::clear_caches() {
  cache_.clear();
}

// ---- memory ----

std::size_t Manager::collect() {
  std::vector<std::uint8_t> mark(nodes_.size(), 0);
  std::vector<NodeRef> stack;
  for (NodeRef r = 0; r < nodes_.size(); ++r) {
    if (ext_refs_[r] > 0 && !mark[r]) {
      mark[r] = 1;
      stack.push_back(r);
    }
  }
  while (!stack.empty()) {
    const Node& n = nodes_[stack.back()];
    stack.pop_back();
    if (n.level == kTerminalLevel) continue;
    for (NodeRef c : {n.hi, n.lo}) {
      if (!mark[c]) {
        mark[c] = 1;
        stack.push_back(c);
      }
    }
  }
  std::size_t freed = 0;
  for (NodeRef r = 0; r < nodes_.size(); ++r) {
    Node& n = nodes_[r];
    if (mark[r] || n.level == kFreeLevel) continue;
    if (n.level == kTerminalLevel) {
      terminals_.release(n.hi);
      terminal_nodes_[n.hi] = kNone;
    } else {
      unique_.erase({n.level, n.hi, n.lo});
    }
    n.level = kFreeLevel;
    free_.push_back(r);
    ++freed;
  }
  clear_caches();
  created_since_collect_ = 0;
  collect_threshold_ = std::max<std::size_t>(1u << 18, 2 * live_nodes());
  return freed;
}

bool Manager::maybe_collect() {
  if (!auto_collect_ || created_since_collect_ < collect_threshold_) return false;
  collect();
  return true;
}

std::size_t Manager::approx_bytes() const {
  constexpr std::size_t kMapEntry = 32;
  return nodes_.capacity() * sizeof(Node) + ext_refs_.capacity() * sizeof(std::uint32_t) +
         free_.capacity() * sizeof(NodeRef) + terminal_nodes_.capacity() * sizeof(NodeRef) +
         unique_.size() * (sizeof(NodeKey) + sizeof(NodeRef) + kMapEntry) +
         unique_.bucket_count() * sizeof(void*) +
         cache_.size() * (sizeof(CacheKey) + sizeof(NodeRef) + kMapEntry) +
         cache_.bucket_count() * sizeof(void*) + terminals_.approx_bytes();
}

}  // namespace quidd
