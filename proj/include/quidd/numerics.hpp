#pragma once

// Arbitrary-precision complex values and the terminal value table.
//
// Terminal values of every diagram live in a TerminalTable owned by the
// diagram manager. Whether two computed values share a terminal is decided
// by dedup_equal(), which is the single knob controlling how much a
// diagram compresses under round-off.

#include <algorithm>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <mpfr.h>

namespace quidd {

inline constexpr unsigned kDefaultMantissaBits = 128;
inline constexpr double kDefaultMergeEpsilon = 1e-30;

/// Real number with a fixed binary precision (MPFR, round-to-nearest).
///
/// Binary operators produce a result at the larger of the operand
/// precisions. A moved-from Real may only be destroyed or assigned to.
class Real {
 public:
  explicit Real(unsigned bits = kDefaultMantissaBits);
  Real(double v, unsigned bits);
  Real(const Real& other);
  Real(Real&& other) noexcept;
  Real& operator=(const Real& other);
  Real& operator=(Real&& other) noexcept;
  ~Real();

  /// Parses a decimal literal ("0.5", "-1e-3"). Throws std::invalid_argument.
  static Real parse(std::string_view text, unsigned bits);
  static Real pi(unsigned bits);

  unsigned precision() const { return static_cast<unsigned>(mpfr_get_prec(v_)); }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  /// Shortest-ish decimal rendering with `digits` significant digits.
  std::string to_string(int digits = 17) const;

  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }
  long exponent2() const;

  Real operator-() const;
  friend Real operator+(const Real& a, const Real& b);
  friend Real operator-(const Real& a, const Real& b);
  friend Real operator*(const Real& a, const Real& b);
  friend Real operator/(const Real& a, const Real& b);
  Real& operator+=(const Real& b);
  Real& operator*=(const Real& b);

  Real abs() const;
  /// Square root; the argument must be non-negative.
  Real sqrt() const;
  /// Exact scaling by 2^e.
  Real ldexp(long e) const;
  /// Rounds to `bits` of precision.
  Real rounded(unsigned bits) const;

  friend int compare(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_); }
  friend bool operator==(const Real& a, const Real& b) { return compare(a, b) == 0; }
  friend bool operator<(const Real& a, const Real& b) { return compare(a, b) < 0; }
  friend bool operator<=(const Real& a, const Real& b) { return compare(a, b) <= 0; }
  friend bool operator>(const Real& a, const Real& b) { return compare(a, b) > 0; }

  mpfr_srcptr get() const { return v_; }
  mpfr_ptr get() { return v_; }

 private:
  mpfr_t v_;
  bool live_ = true;
};

/// Complex number with real and imaginary parts at a shared precision.
class Complex {
 public:
  explicit Complex(unsigned bits = kDefaultMantissaBits) : re_(bits), im_(bits) {}
  Complex(double re, double im, unsigned bits) : re_(re, bits), im_(im, bits) {}
  Complex(std::complex<double> z, unsigned bits) : re_(z.real(), bits), im_(z.imag(), bits) {}
  Complex(Real re, Real im) : re_(std::move(re)), im_(std::move(im)) {}

  const Real& re() const { return re_; }
  const Real& im() const { return im_; }
  unsigned precision() const { return std::max(re_.precision(), im_.precision()); }

  bool is_zero() const { return re_.is_zero() && im_.is_zero(); }
  std::complex<double> to_std() const { return {re_.to_double(), im_.to_double()}; }
  /// "a", "bi", "a+bi" with `digits` significant digits per component.
  std::string to_string(int digits = 17) const;

  Complex operator-() const { return {-re_, -im_}; }
  friend Complex operator+(const Complex& a, const Complex& b);
  friend Complex operator-(const Complex& a, const Complex& b);
  friend Complex operator*(const Complex& a, const Complex& b);
  friend Complex operator*(const Complex& a, const Real& s) { return {a.re_ * s, a.im_ * s}; }
  friend Complex operator/(const Complex& a, const Real& s) { return {a.re_ / s, a.im_ / s}; }
  /// Full complex division; the divisor must be nonzero.
  friend Complex operator/(const Complex& a, const Complex& b);

  Complex conj() const { return {re_, -im_}; }
  /// |z|^2
  Real norm() const { return re_ * re_ + im_ * im_; }
  Real abs() const { return norm().sqrt(); }
  Complex ldexp(long e) const { return {re_.ldexp(e), im_.ldexp(e)}; }
  Complex rounded(unsigned bits) const { return {re_.rounded(bits), im_.rounded(bits)}; }

  /// Bitwise equality of both components.
  friend bool operator==(const Complex& a, const Complex& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }

 private:
  Real re_;
  Real im_;
};

/// e^{2 pi i k / n}. Values on the axes and diagonals are exact, and all
/// other values are computed from the first octant so that symmetric roots
/// agree bit for bit.
Complex root_of_unity(long k, long n, unsigned bits);

/// 2^{-e/2}, exact when e is even.
Real inv_sqrt2_pow(long e, unsigned bits);

enum class ComparisonMode { absolute, relative };

struct PrecisionConfig {
  unsigned mantissa_bits = kDefaultMantissaBits;
  /// 0 means exact bitwise comparison.
  double merge_epsilon = kDefaultMergeEpsilon;
  ComparisonMode comparison_mode = ComparisonMode::relative;

  /// "precision-bits=128 epsilon=1e-30 mode=relative"
  std::string describe() const;
};

/// Terminal merge predicate: |a-b| <= eps (absolute) or
/// |a-b| <= eps * max(|a|,|b|) (relative). Symmetric and reflexive, but not
/// transitive for eps > 0.
bool dedup_equal(const Complex& a, const Complex& b, const PrecisionConfig& cfg);

/// Append-only array of distinct terminal values.
///
/// intern() returns the index of the first stored value (in insertion order)
/// that is dedup-equal to the query, appending the query otherwise. Indices
/// are never reused. Slots may be released by the owning manager's garbage
/// collector once no node refers to them.
class TerminalTable {
 public:
  explicit TerminalTable(PrecisionConfig cfg = {});

  std::uint32_t intern(const Complex& v);
  std::optional<std::uint32_t> find(const Complex& v) const;
  const Complex& value(std::uint32_t index) const { return slots_[index]->value; }
  bool contains(std::uint32_t index) const {
    return index < slots_.size() && slots_[index] != nullptr;
  }
  void release(std::uint32_t index);

  /// Number of live (unreleased) values.
  std::size_t size() const { return live_; }
  /// Number of indices ever handed out.
  std::size_t issued() const { return slots_.size(); }
  /// Approximate heap footprint of the live values.
  std::size_t approx_bytes() const;

  const PrecisionConfig& config() const { return cfg_; }

 private:
  struct RealLess {
    bool operator()(const Real& a, const Real& b) const { return a < b; }
  };
  using Index = std::multimap<Real, std::uint32_t, RealLess>;
  struct Slot {
    Complex value;
    Index::iterator where;
  };

  // [lo, hi] window on the real part that can contain a match for v.
  std::pair<Index::const_iterator, Index::const_iterator> window(const Complex& v) const;

  PrecisionConfig cfg_;
  Real eps_;
  Real eps_sq_;
  std::vector<std::unique_ptr<Slot>> slots_;
  Index by_re_;
  std::size_t live_ = 0;
};

}  // namespace quidd
