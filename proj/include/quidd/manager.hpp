#pragma once

// Reduced ordered decision diagrams over interleaved row/column
// variables with complex terminals.
//
// A Manager owns every node. Nodes are hash-consed through a unique table,
// so two diagrams denote the same function iff their roots are the same
// NodeRef. Diagram is the reference-counted handle users hold; raw NodeRefs
// are only safe between garbage collections and are meant for algorithm
// implementations (see linalg.cpp).
//
// Variable order: R0 < C0 < R1 < C1 < ... < terminals. A variable's
// "level" is 2*qubit for rows and 2*qubit+1 for columns; qubit 0 is the
// most significant bit of a row/column index.
//
// A manager and its handles are confined to one thread. Handles must not
// outlive their manager.

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "quidd/errors.hpp"
#include "quidd/numerics.hpp"

namespace quidd {

enum class VarKind : std::uint8_t { row = 0, col = 1 };

struct VariableLabel {
  VarKind kind = VarKind::row;
  std::uint32_t qubit = 0;

  static constexpr VariableLabel row(std::uint32_t q) { return {VarKind::row, q}; }
  static constexpr VariableLabel col(std::uint32_t q) { return {VarKind::col, q}; }
  static constexpr VariableLabel at_level(std::uint32_t level) {
    return {(level & 1u) ? VarKind::col : VarKind::row, level >> 1};
  }

  constexpr std::uint32_t level() const {
    return 2 * qubit + (kind == VarKind::col ? 1u : 0u);
  }
  std::string name() const;

  friend constexpr auto operator<=>(VariableLabel a, VariableLabel b) {
    return a.level() <=> b.level();
  }
  friend constexpr bool operator==(VariableLabel a, VariableLabel b) {
    return a.level() == b.level();
  }
};

using NodeRef = std::uint32_t;

inline constexpr std::uint32_t kTerminalLevel = 0xFFFFFFFFu;

struct Node {
  std::uint32_t level;  // kTerminalLevel for terminals
  NodeRef hi;           // then-child, or the terminal index for terminals
  NodeRef lo;           // else-child
};

struct NodeStats {
  std::size_t internal_count = 0;
  std::size_t terminal_count = 0;
  std::size_t total = 0;
};

/// Binary terminal operation for apply().
///
/// Only tagged operations are memoized across calls. `algebra` enables the
/// identity/annihilator shortcuts of + and *.
struct BinaryOp {
  enum class Algebra : std::uint8_t { none, additive, multiplicative };

  std::function<Complex(const Complex&, const Complex&)> fn;
  std::optional<std::uint32_t> tag;
  bool commutative = false;
  Algebra algebra = Algebra::none;
};

/// Terminal-wise map for map_terminals().
struct UnaryOp {
  std::function<Complex(const Complex&)> fn;
  std::optional<std::uint32_t> tag;
};

/// Computed-table tags. Everything below first_dynamic is reserved for the
/// library; Manager::new_op_tag() hands out the rest.
namespace op_tag {

inline constexpr std::uint32_t add = 1;
inline constexpr std::uint32_t subtract = 2;
inline constexpr std::uint32_t multiply = 3;
inline constexpr std::uint32_t conjugate = 4;
inline constexpr std::uint32_t shift = 5;
inline constexpr std::uint32_t first_dynamic = 1u << 16;

}  // namespace op_tag

namespace ops {

const BinaryOp& add();
const BinaryOp& subtract();
const BinaryOp& multiply();
const UnaryOp& conjugate();

}  // namespace ops

/// Recursion counters; a call is one non-trivial recursive step.
struct OpCounters {
  std::uint64_t apply_calls = 0;
  std::uint64_t apply_hits = 0;
  std::uint64_t matmul_calls = 0;
  std::uint64_t matmul_hits = 0;

  std::uint64_t total_calls() const { return apply_calls + matmul_calls; }
  friend bool operator==(const OpCounters&, const OpCounters&) = default;
};

/// Key of the manager's computed table. `op` identifies the operation and
/// `extra` carries any additional integer argument.
struct CacheKey {
  std::uint32_t op;
  NodeRef a;
  NodeRef b;
  std::uint32_t extra;
  friend bool operator==(const CacheKey&, const CacheKey&) = default;
};

struct CacheKeyHash {
  std::size_t operator()(const CacheKey& k) const noexcept;
};

class Manager;

/// Reference-counted handle to a diagram root.
class Diagram {
 public:
  Diagram() = default;
  Diagram(Manager& manager, NodeRef root);
  Diagram(const Diagram& other);
  Diagram(Diagram&& other) noexcept;
  Diagram& operator=(const Diagram& other);
  Diagram& operator=(Diagram&& other) noexcept;
  ~Diagram();

  bool valid() const { return mgr_ != nullptr; }
  Manager& manager() const;
  NodeRef root() const { return root_; }
  bool is_terminal() const;

  friend bool operator==(const Diagram& a, const Diagram& b) {
    return a.mgr_ == b.mgr_ && a.root_ == b.root_;
  }

 private:
  void acquire();
  void release();

  Manager* mgr_ = nullptr;
  NodeRef root_ = 0;
};

class Manager {
 public:
  explicit Manager(PrecisionConfig cfg = {});
  Manager(const Manager&) = delete;
  Manager& operator=(const Manager&) = delete;

  const PrecisionConfig& precision() const { return terminals_.config(); }
  unsigned bits() const { return precision().mantissa_bits; }
  const TerminalTable& terminals() const { return terminals_; }

  // ---- handle level ----

  Diagram constant(const Complex& value);
  Diagram constant(double re, double im = 0.0);
  Diagram zero() { return wrap(zero_); }
  Diagram one() { return wrap(one_); }

  /// Node testing `var`; returns the child itself when both are equal.
  /// Throws OrderingError unless `var` precedes both children's variables.
  Diagram make_internal(VariableLabel var, const Diagram& then_child, const Diagram& else_child);

  /// Pointwise op(a, b), reduced.
  Diagram apply(const Diagram& a, const Diagram& b, const BinaryOp& op);
  Diagram map_terminals(const Diagram& d, const UnaryOp& op);
  /// Renames Row(i)/Col(i) to Row(i+offset)/Col(i+offset).
  Diagram shift_variables(const Diagram& d, std::uint32_t qubit_offset);

  NodeStats node_stats(const Diagram& d) const;
  /// Reachable internal nodes, parents before children.
  std::vector<NodeRef> internal_nodes(const Diagram& d) const;
  /// Distinct reachable terminal values, in terminal-index order.
  std::vector<Complex> terminal_values(const Diagram& d) const;
  /// Highest qubit index tested anywhere in `d`, or nullopt for constants.
  std::optional<std::uint32_t> max_qubit(const Diagram& d) const;
  /// True iff no reachable node tests a variable of kind `kind`.
  bool independent_of(const Diagram& d, VarKind kind) const;

  /// Value at the given row/column bit assignment (qubit 0 first).
  Complex eval(const Diagram& d, std::span<const std::uint8_t> row_bits,
               std::span<const std::uint8_t> col_bits) const;
  /// Same as eval() with integer indices over `qubits` bits, qubit 0 = MSB.
  Complex eval_index(const Diagram& d, std::uint64_t row, std::uint64_t col,
                     std::uint32_t qubits) const;

  /// Checks ordering, rule 2 (no redundant tests) and rule 1 (no duplicate
  /// nodes) on everything reachable from `d`.
  bool audit(const Diagram& d) const;

  /// Graphviz rendering; solid edges are then-edges.
  std::string to_dot(const Diagram& d, std::string_view graph_name = "quidd") const;

  /// Throws ManagerMismatch unless `d` belongs to this manager.
  void check_owned(const Diagram& d) const;

  // ---- raw node level ----

  const Node& node(NodeRef r) const { return nodes_[r]; }
  bool is_terminal(NodeRef r) const { return nodes_[r].level == kTerminalLevel; }
  std::uint32_t level(NodeRef r) const { return nodes_[r].level; }
  const Complex& value(NodeRef terminal) const { return terminals_.value(nodes_[terminal].hi); }
  NodeRef zero_ref() const { return zero_; }
  NodeRef one_ref() const { return one_; }

  NodeRef terminal_ref(const Complex& v);
  NodeRef internal_ref(std::uint32_t level, NodeRef then_child, NodeRef else_child);
  NodeRef apply_ref(NodeRef a, NodeRef b, const BinaryOp& op);
  NodeRef map_ref(NodeRef d, const UnaryOp& op);
  /// Child of `r` for `level` = bit, or `r` itself if it does not test `level`.
  NodeRef cofactor(NodeRef r, std::uint32_t level, bool bit) const {
    const Node& n = nodes_[r];
    if (n.level != level) return r;
    return bit ? n.hi : n.lo;
  }
  Diagram wrap(NodeRef r) { return Diagram(*this, r); }

  // ---- computed table ----

  std::optional<NodeRef> cache_find(const CacheKey& key) const;
  void cache_put(const CacheKey& key, NodeRef result);
  /// Fresh tag for a user-defined memoized operation.
  std::uint32_t new_op_tag() { return next_tag_++; }
  void clear_caches();
  std::size_t cache_size() const { return cache_.size(); }

  // ---- memory ----

  /// Frees every node unreachable from a live handle and every terminal
  /// value no longer referenced, then clears the computed table. Returns the
  /// number of nodes freed. Only call between operations.
  std::size_t collect();
  /// collect() if enough nodes were created since the last collection.
  bool maybe_collect();
  void set_auto_collect(bool enabled) { auto_collect_ = enabled; }
  bool auto_collect() const { return auto_collect_; }

  std::size_t live_nodes() const { return nodes_.size() - free_.size(); }
  std::size_t peak_nodes() const { return peak_nodes_; }
  /// Approximate footprint: node storage, unique/computed tables, terminals.
  std::size_t approx_bytes() const;

  OpCounters& counters() { return counters_; }
  const OpCounters& counters() const { return counters_; }

 private:
  friend class Diagram;

  struct NodeKey {
    std::uint32_t level;
    NodeRef hi;
    NodeRef lo;
    friend bool operator==(const NodeKey&, const NodeKey&) = default;
  };
  struct NodeKeyHash {
    std::size_t operator()(const NodeKey& k) const noexcept;
  };
  using LocalCache = std::unordered_map<CacheKey, NodeRef, CacheKeyHash>;

  NodeRef allocate(const Node& n);
  NodeRef apply_rec(NodeRef a, NodeRef b, const BinaryOp& op, LocalCache* local);
  NodeRef map_rec(NodeRef d, const UnaryOp& op, LocalCache* local);
  NodeRef shift_rec(NodeRef d, std::uint32_t level_offset);
  std::vector<NodeRef> reachable(NodeRef root) const;

  TerminalTable terminals_;
  std::vector<Node> nodes_;
  std::vector<std::uint32_t> ext_refs_;
  std::vector<NodeRef> free_;
  std::unordered_map<NodeKey, NodeRef, NodeKeyHash> unique_;
  std::vector<NodeRef> terminal_nodes_;  // terminal index -> node
  LocalCache cache_;
  NodeRef zero_ = 0;
  NodeRef one_ = 0;
  std::uint32_t next_tag_ = op_tag::first_dynamic;
  bool auto_collect_ = true;
  std::size_t created_since_collect_ = 0;
  std::size_t collect_threshold_ = 1u << 18;
  std::size_t peak_nodes_ = 0;
  OpCounters counters_;
};

inline Diagram::Diagram(Manager& manager, NodeRef root) : mgr_(&manager), root_(root) {
  acquire();
}
inline Diagram::Diagram(const Diagram& other) : mgr_(other.mgr_), root_(other.root_) {
  acquire();
}
inline Diagram::Diagram(Diagram&& other) noexcept : mgr_(other.mgr_), root_(other.root_) {
  other.mgr_ = nullptr;
}
inline Diagram& Diagram::operator=(const Diagram& other) {
  if (this != &other) {
    Diagram copy(other);
    *this = std::move(copy);
  }
  return *this;
}
inline Diagram& Diagram::operator=(Diagram&& other) noexcept {
  if (this != &other) {
    release();
    mgr_ = other.mgr_;
    root_ = other.root_;
    other.mgr_ = nullptr;
  }
  return *this;
}
inline Diagram::~Diagram() { release(); }
inline void Diagram::acquire() {
  if (mgr_) ++mgr_->ext_refs_[root_];
}
inline void Diagram::release() {
  if (mgr_) --mgr_->ext_refs_[root_];
  mgr_ = nullptr;
}
inline Manager& Diagram::manager() const {
  if (!mgr_) throw Error("use of an empty diagram handle");
  return *mgr_;
}
inline bool Diagram::is_terminal() const { return manager().is_terminal(root_); }

}  // namespace quidd
