#pragma once

// Persistent sets of complex numbers.
//
// A finite set G is persistent when |G^k| (all k-element products) is the
// same for every k >= 1. The nonempty persistent sets are exactly c*U_n and
// {0} u c*U_n, where U_n are the n-th roots of unity; classify() decides
// membership structurally and n_element_products() gives the brute-force
// check.
//
// Three element types are supported. GaussianRational and PolarExact use
// exact arithmetic. FloatComplex compares with a 1e-12 tolerance.

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <gmpxx.h>

namespace quidd::persist {

/// re + im*i with rational parts.
struct GaussianRational {
  mpq_class re;
  mpq_class im;

  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.re == b.re && a.im == b.im;
  }
};

/// sqrt(mag2) * e^{2 pi i turn}, turn in [0, 1). Represents roots of unity
/// and their rational-magnitude multiples exactly.
struct PolarExact {
  bool zero = false;
  mpq_class mag2 = 1;
  mpq_class turn = 0;

  static PolarExact root_of_unity(long k, long n);
  static PolarExact zero_value() { return {true, 0, 0}; }

  friend bool operator==(const PolarExact& a, const PolarExact& b) {
    if (a.zero || b.zero) return a.zero == b.zero;
    return a.mag2 == b.mag2 && a.turn == b.turn;
  }
};

using FloatComplex = std::complex<double>;

inline constexpr double kFloatTolerance = 1e-12;

GaussianRational operator*(const GaussianRational& a, const GaussianRational& b);
PolarExact operator*(const PolarExact& a, const PolarExact& b);

std::string to_string(const GaussianRational& v);
std::string to_string(const PolarExact& v);
std::string to_string(const FloatComplex& v);

/// Deduplicated element list (exact equality, or the float tolerance).
template <class T>
using FiniteSet = std::vector<T>;

template <class T>
struct PersistenceResult {
  bool persistent = false;
  bool includes_zero = false;
  /// Nonzero element with the smallest argument in [0, 2 pi / n).
  std::optional<T> scale_c;
  std::optional<std::size_t> degree_n;
  /// Why the set was rejected; empty when persistent.
  std::string reason;
};

template <class T>
FiniteSet<T> make_set(std::vector<T> elements);

template <class T>
FiniteSet<T> all_pairs_product(const FiniteSet<T>& a, const FiniteSet<T>& b);

/// G^n. Throws std::invalid_argument for n == 0.
template <class T>
FiniteSet<T> n_element_products(const FiniteSet<T>& g, std::size_t n);

/// |G^k| constant for k = 1..max_k.
template <class T>
bool brute_force_persistent(const FiniteSet<T>& g, std::size_t max_k = 6);

/// Structural classification. Throws std::invalid_argument for an empty set.
/// {0} alone is persistent with no scale and no degree.
template <class T>
PersistenceResult<T> classify(const FiniteSet<T>& g);

/// One-line summary: "persistent: c=1, n=2", "persistent: c=1/2, n=4, with 0",
/// "persistent: {0}" or "not persistent: <reason>".
template <class T>
std::string describe(const PersistenceResult<T>& r);

/// A parsed set literal in the most exact representation that holds every
/// element.
using AnySet =
    std::variant<FiniteSet<GaussianRational>, FiniteSet<PolarExact>, FiniteSet<FloatComplex>>;

/// Parses a comma-separated list of complex literals such as
/// "0, 1, i, -1, -i", "1/2+3/4i", "2*w(1,3)". Exact where possible; with
/// `force_float` every element is converted to double. Throws ParseError
/// with column numbers relative to `line`.
AnySet parse_set(std::string_view line, bool force_float = false, std::size_t line_number = 1);

/// The same literal grammar, in order and without deduplication.
std::vector<FloatComplex> parse_complex_list(std::string_view text, std::size_t line_number = 1);

/// classify() on whichever representation parse_set() produced.
std::string classify_and_describe(const AnySet& s);

}  // namespace quidd::persist
