#include "quidd/persistence.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "quidd/errors.hpp"

namespace quidd::persist {

namespace {

mpq_class frac_part(const mpq_class& t) {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), t.get_num_mpz_t(), t.get_den_mpz_t());
  return t - mpq_class(q);
}

bool is_integer(const mpq_class& q) { return q.get_den() == 1; }

std::optional<mpq_class> rational_sqrt(const mpq_class& q) {
  if (q < 0) return std::nullopt;
  if (!mpz_perfect_square_p(q.get_num_mpz_t()) || !mpz_perfect_square_p(q.get_den_mpz_t())) {
    return std::nullopt;
  }
  mpz_class n, d;
  mpz_sqrt(n.get_mpz_t(), q.get_num_mpz_t());
  mpz_sqrt(d.get_mpz_t(), q.get_den_mpz_t());
  mpq_class r(n, d);
  r.canonicalize();
  return r;
}

// ---- per-type element operations ----

bool same(const GaussianRational& a, const GaussianRational& b) { return a == b; }
bool same(const PolarExact& a, const PolarExact& b) { return a == b; }
bool same(const FloatComplex& a, const FloatComplex& b) {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) <= kFloatTolerance * scale;
}

bool is_zero(const GaussianRational& a) { return a.re == 0 && a.im == 0; }
bool is_zero(const PolarExact& a) { return a.zero; }
bool is_zero(const FloatComplex& a) { return std::abs(a) <= kFloatTolerance; }

bool same_magnitude(const GaussianRational& a, const GaussianRational& b) {
  return a.re * a.re + a.im * a.im == b.re * b.re + b.im * b.im;
}
bool same_magnitude(const PolarExact& a, const PolarExact& b) { return a.mag2 == b.mag2; }
bool same_magnitude(const FloatComplex& a, const FloatComplex& b) {
  const double na = std::norm(a), nb = std::norm(b);
  return std::abs(na - nb) <= kFloatTolerance * std::max({1.0, na, nb});
}

GaussianRational divide(const GaussianRational& a, const GaussianRational& b) {
  const mpq_class d = b.re * b.re + b.im * b.im;
  GaussianRational q{(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
  q.re.canonicalize();
  q.im.canonicalize();
  return q;
}
PolarExact divide(const PolarExact& a, const PolarExact& b) {
  if (a.zero) return a;
  mpq_class m = a.mag2 / b.mag2;
  m.canonicalize();
  return {false, m, frac_part(a.turn - b.turn)};
}
FloatComplex divide(const FloatComplex& a, const FloatComplex& b) { return a / b; }

bool power_is_one(const GaussianRational& w, std::size_t n) {
  GaussianRational p{1, 0};
  for (std::size_t i = 0; i < n; ++i) p = p * w;
  return p == GaussianRational{1, 0};
}
bool power_is_one(const PolarExact& w, std::size_t n) {
  return !w.zero && w.mag2 == 1 && is_integer(w.turn * static_cast<long>(n));
}
bool power_is_one(const FloatComplex& w, std::size_t n) {
  FloatComplex p = 1.0;
  for (std::size_t i = 0; i < n; ++i) p *= w;
  return same(p, FloatComplex(1.0));
}

double turns(double re, double im) {
  double t = std::atan2(im, re) / (2.0 * M_PI);
  if (t < 0) t += 1.0;
  if (t >= 1.0) t -= 1.0;
  return t;
}

bool arg_less(const GaussianRational& a, const GaussianRational& b) {
  return turns(a.re.get_d(), a.im.get_d()) < turns(b.re.get_d(), b.im.get_d());
}
bool arg_less(const PolarExact& a, const PolarExact& b) { return a.turn < b.turn; }
bool arg_less(const FloatComplex& a, const FloatComplex& b) {
  // Snap arguments within tolerance of a full turn back to zero.
  auto key = [](const FloatComplex& z) {
    const double t = turns(z.real(), z.imag());
    return 1.0 - t <= kFloatTolerance ? 0.0 : t;
  };
  return key(a) < key(b);
}

std::string rational_string(const mpq_class& q) { return q.get_str(); }

}  // namespace

PolarExact PolarExact::root_of_unity(long k, long n) {
  if (n <= 0) throw std::invalid_argument("root of unity order must be positive");
  mpq_class t(k, n);
  t.canonicalize();
  return {false, 1, frac_part(t)};
}

GaussianRational operator*(const GaussianRational& a, const GaussianRational& b) {
  GaussianRational p{a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  p.re.canonicalize();
  p.im.canonicalize();
  return p;
}

PolarExact operator*(const PolarExact& a, const PolarExact& b) {
  if (a.zero || b.zero) return PolarExact::zero_value();
  mpq_class m = a.mag2 * b.mag2;
  m.canonicalize();
  return {false, m, frac_part(a.turn + b.turn)};
}

std::string to_string(const GaussianRational& v) {
  if (v.im == 0) return rational_string(v.re);
  std::string im;
  const mpq_class mag = abs(v.im);
  if (mag != 1) im = rational_string(mag);
  im += "i";
  if (v.re == 0) return (v.im < 0 ? "-" : "") + im;
  return rational_string(v.re) + (v.im < 0 ? "-" : "+") + im;
}

std::string to_string(const PolarExact& v) {
  if (v.zero) return "0";
  std::string mag;
  if (v.mag2 != 1) {
    auto r = rational_sqrt(v.mag2);
    mag = r ? rational_string(*r) : "sqrt(" + rational_string(v.mag2) + ")";
  }
  if (v.turn == 0) return mag.empty() ? "1" : mag;
  const std::string w = "w(" + v.turn.get_num().get_str() + "," + v.turn.get_den().get_str() + ")";
  return mag.empty() ? w : mag + "*" + w;
}

std::string to_string(const FloatComplex& v) {
  char buf[96];
  if (v.imag() == 0.0) {
    std::snprintf(buf, sizeof buf, "%.12g", v.real());
  } else if (v.real() == 0.0) {
    std::snprintf(buf, sizeof buf, "%.12gi", v.imag());
  } else {
    std::snprintf(buf, sizeof buf, "%.12g%+.12gi", v.real(), v.imag());
  }
  return buf;
}

template <class T>
FiniteSet<T> make_set(std::vector<T> elements) {
  FiniteSet<T> out;
  for (T& x : elements) {
    if (std::none_of(out.begin(), out.end(), [&](const T& y) { return same(x, y); })) {
      out.push_back(std::move(x));
    }
  }
  return out;
}

template <class T>
FiniteSet<T> all_pairs_product(const FiniteSet<T>& a, const FiniteSet<T>& b) {
  std::vector<T> prods;
  prods.reserve(a.size() * b.size());
  for (const T& x : a)
    for (const T& y : b) prods.push_back(x * y);
  return make_set(std::move(prods));
}

template <class T>
FiniteSet<T> n_element_products(const FiniteSet<T>& g, std::size_t n) {
  if (n == 0) throw std::invalid_argument("n_element_products needs n >= 1");
  FiniteSet<T> p = make_set(g);
  for (std::size_t k = 1; k < n; ++k) p = all_pairs_product(p, g);
  return p;
}

template <class T>
bool brute_force_persistent(const FiniteSet<T>& g, std::size_t max_k) {
  FiniteSet<T> base = make_set(g);
  FiniteSet<T> p = base;
  for (std::size_t k = 2; k <= max_k; ++k) {
    p = all_pairs_product(p, base);
    if (p.size() != base.size()) return false;
  }
  return true;
}

template <class T>
PersistenceResult<T> classify(const FiniteSet<T>& input) {
  const FiniteSet<T> g = make_set(input);
  if (g.empty()) throw std::invalid_argument("classify needs a non-empty set");
  PersistenceResult<T> r;
  std::vector<T> nz;
  for (const T& x : g) {
    if (is_zero(x)) {
      r.includes_zero = true;
    } else {
      nz.push_back(x);
    }
  }
  if (nz.empty()) {
    r.persistent = true;
    return r;
  }
  for (const T& x : nz) {
    if (!same_magnitude(x, nz.front())) {
      r.reason = "nonzero elements differ in magnitude";
      return r;
    }
  }
  const T z = nz.front();
  std::vector<T> normalized;
  for (const T& x : nz) normalized.push_back(divide(x, z));
  auto member = [&](const T& v) {
    return std::any_of(normalized.begin(), normalized.end(), [&](const T& y) { return same(v, y); });
  };
  for (const T& a : normalized) {
    for (const T& b : normalized) {
      if (!member(a * b)) {
        r.reason = "normalized set is not closed under multiplication";
        return r;
      }
    }
  }
  const std::size_t n = normalized.size();
  for (const T& w : normalized) {
    if (!power_is_one(w, n)) {
      r.reason = "normalized set is not the group of " + std::to_string(n) + "-th roots of unity";
      return r;
    }
  }
  r.persistent = true;
  r.degree_n = n;
  r.scale_c = *std::min_element(nz.begin(), nz.end(),
                                [](const T& a, const T& b) { return arg_less(a, b); });
  return r;
}

template <class T>
std::string describe(const PersistenceResult<T>& r) {
  if (!r.persistent) return "not persistent: " + r.reason;
  if (!r.scale_c) return "persistent: {0}";
  std::string s = "persistent: c=" + to_string(*r.scale_c) + ", n=" + std::to_string(*r.degree_n);
  if (r.includes_zero) s += ", with 0";
  return s;
}

#define QUIDD_PERSIST_INSTANTIATE(T)                                               \
  template FiniteSet<T> make_set(std::vector<T>);                                  \
  template FiniteSet<T> all_pairs_product(const FiniteSet<T>&, const FiniteSet<T>&); \
  template FiniteSet<T> n_element_products(const FiniteSet<T>&, std::size_t);      \
  template bool brute_force_persistent(const FiniteSet<T>&, std::size_t);          \
  template PersistenceResult<T> classify(const FiniteSet<T>&);                     \
  template std::string describe(const PersistenceResult<T>&);

QUIDD_PERSIST_INSTANTIATE(GaussianRational)
QUIDD_PERSIST_INSTANTIATE(PolarExact)
QUIDD_PERSIST_INSTANTIATE(FloatComplex)

#undef QUIDD_PERSIST_INSTANTIATE

// ---- literal parsing ----

namespace {

struct Literal {
  std::optional<GaussianRational> gauss;
  std::optional<PolarExact> polar;
  FloatComplex approx;
};

std::optional<PolarExact> gauss_to_polar(const GaussianRational& g) {
  if (g.re == 0 && g.im == 0) return PolarExact::zero_value();
  const mpq_class m = g.re * g.re + g.im * g.im;
  auto with_turn = [&](long k, long n) {
    PolarExact p = PolarExact::root_of_unity(k, n);
    p.mag2 = m;
    p.mag2.canonicalize();
    return p;
  };
  if (g.im == 0) return with_turn(g.re > 0 ? 0 : 1, 2);
  if (g.re == 0) return with_turn(g.im > 0 ? 1 : 3, 4);
  if (abs(g.re) == abs(g.im)) {
    if (g.re > 0) return with_turn(g.im > 0 ? 1 : 7, 8);
    return with_turn(g.im > 0 ? 3 : 5, 8);
  }
  return std::nullopt;
}

std::optional<GaussianRational> polar_to_gauss(const PolarExact& p) {
  if (p.zero) return GaussianRational{0, 0};
  const mpq_class eighths = p.turn * 8;
  if (!is_integer(eighths)) return std::nullopt;
  const long k = eighths.get_num().get_si();
  if (k % 2 == 0) {
    auto r = rational_sqrt(p.mag2);
    if (!r) return std::nullopt;
    static const int re[] = {1, 0, -1, 0}, im[] = {0, 1, 0, -1};
    return GaussianRational{*r * re[k / 2], *r * im[k / 2]};
  }
  mpq_class half = p.mag2 / 2;
  half.canonicalize();
  auto r = rational_sqrt(half);
  if (!r) return std::nullopt;
  static const int re[] = {1, -1, -1, 1}, im[] = {1, 1, -1, -1};
  return GaussianRational{*r * re[k / 2], *r * im[k / 2]};
}

FloatComplex approx_of(const PolarExact& p) {
  if (p.zero) return 0.0;
  return std::polar(std::sqrt(p.mag2.get_d()), 2.0 * M_PI * p.turn.get_d());
}

class LiteralParser {
 public:
  LiteralParser(std::string_view text, std::size_t line) : s_(text), line_(line) {}

  std::vector<Literal> parse_all() {
    std::vector<Literal> out;
    skip_ws();
    if (at_end()) fail("empty set");
    while (true) {
      out.push_back(element());
      skip_ws();
      if (at_end()) break;
      expect(',');
      skip_ws();
      if (at_end()) fail("expected an element after ','");
    }
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line_, pos_ + 1, msg); }
  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return at_end() ? '\0' : s_[pos_]; }
  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  // number := digits ['.' digits] [('e'|'E') [sign] digits] ['/' digits]
  std::optional<mpq_class> number() {
    const std::size_t start = pos_;
    std::string digits;
    while (std::isdigit(static_cast<unsigned char>(peek()))) digits += s_[pos_++];
    long scale = 0;
    if (peek() == '.') {
      ++pos_;
      while (std::isdigit(static_cast<unsigned char>(peek()))) {
        digits += s_[pos_++];
        --scale;
      }
    }
    if (digits.empty()) {
      pos_ = start;
      return std::nullopt;
    }
    if (peek() == 'e' || peek() == 'E') {
      ++pos_;
      bool neg = false;
      if (peek() == '+' || peek() == '-') neg = s_[pos_++] == '-';
      std::string ex;
      while (std::isdigit(static_cast<unsigned char>(peek()))) ex += s_[pos_++];
      if (ex.empty() || ex.size() > 4) fail("bad exponent");
      scale += neg ? -std::stol(ex) : std::stol(ex);
    }
    mpq_class q{mpz_class(digits, 10)};
    mpz_class ten = 1;
    mpz_ui_pow_ui(ten.get_mpz_t(), 10, static_cast<unsigned long>(scale < 0 ? -scale : scale));
    if (scale < 0) {
      q /= ten;
    } else {
      q *= ten;
    }
    if (peek() == '/') {
      ++pos_;
      std::string den;
      while (std::isdigit(static_cast<unsigned char>(peek()))) den += s_[pos_++];
      if (den.empty()) fail("expected a denominator");
      mpz_class d(den, 10);
      if (d == 0) fail("zero denominator");
      q /= mpq_class(d);
    }
    q.canonicalize();
    return q;
  }

  long integer() {
    skip_ws();
    bool neg = false;
    if (peek() == '+' || peek() == '-') neg = s_[pos_++] == '-';
    std::string d;
    while (std::isdigit(static_cast<unsigned char>(peek()))) d += s_[pos_++];
    if (d.empty() || d.size() > 12) fail("expected an integer");
    skip_ws();
    const long v = std::stol(d);
    return neg ? -v : v;
  }

  // term := number | [number ['*']] 'i' | [number '*'] 'w(' k ',' n ')'
  // Returns (gauss part, polar part) where exactly one is set.
  std::pair<std::optional<GaussianRational>, std::optional<PolarExact>> term() {
    skip_ws();
    const std::size_t start = pos_;
    std::optional<mpq_class> coef = number();
    skip_ws();
    bool star = false;
    if (coef && peek() == '*') {
      ++pos_;
      star = true;
      skip_ws();
    }
    if (peek() == 'i') {
      ++pos_;
      return {GaussianRational{0, coef.value_or(1)}, std::nullopt};
    }
    if (peek() == 'w') {
      ++pos_;
      expect('(');
      const long k = integer();
      expect(',');
      const long n = integer();
      expect(')');
      if (n <= 0) fail("root of unity order must be positive");
      PolarExact p = PolarExact::root_of_unity(k, n);
      if (coef) {
        if (*coef == 0) return {std::nullopt, PolarExact::zero_value()};
        p.mag2 = *coef * *coef;
      }
      return {std::nullopt, p};
    }
    if (star) fail("expected 'i' or 'w(k,n)' after '*'");
    if (!coef) {
      pos_ = start;
      fail("expected a number, 'i' or 'w(k,n)'");
    }
    return {GaussianRational{*coef, 0}, std::nullopt};
  }

  Literal element() {
    GaussianRational sum{0, 0};
    std::optional<PolarExact> polar;
    int terms = 0;
    bool negate = false;
    skip_ws();
    if (peek() == '+' || peek() == '-') negate = s_[pos_++] == '-';
    while (true) {
      const std::size_t start = pos_;
      auto [g, p] = term();
      ++terms;
      if (p) {
        if (polar || terms > 1) {
          pos_ = start;
          fail("w(k,n) terms cannot be added to other terms");
        }
        if (negate && !p->zero) p->turn = frac_part(p->turn + mpq_class(1, 2));
        polar = p;
      } else {
        if (polar) {
          pos_ = start;
          fail("w(k,n) terms cannot be added to other terms");
        }
        if (negate) {
          g->re = -g->re;
          g->im = -g->im;
        }
        sum.re += g->re;
        sum.im += g->im;
      }
      skip_ws();
      if (peek() != '+' && peek() != '-') break;
      negate = s_[pos_++] == '-';
    }
    Literal lit;
    if (polar) {
      lit.polar = polar;
      lit.gauss = polar_to_gauss(*polar);
      lit.approx = approx_of(*polar);
    } else {
      sum.re.canonicalize();
      sum.im.canonicalize();
      lit.gauss = sum;
      lit.polar = gauss_to_polar(sum);
      lit.approx = {sum.re.get_d(), sum.im.get_d()};
    }
    return lit;
  }

  std::string_view s_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

}  // namespace

AnySet parse_set(std::string_view line, bool force_float, std::size_t line_number) {
  const std::vector<Literal> lits = LiteralParser(line, line_number).parse_all();
  const bool all_gauss = std::all_of(lits.begin(), lits.end(), [](const Literal& l) { return l.gauss.has_value(); });
  const bool all_polar = std::all_of(lits.begin(), lits.end(), [](const Literal& l) { return l.polar.has_value(); });
  if (!force_float && all_gauss) {
    std::vector<GaussianRational> v;
    for (const Literal& l : lits) v.push_back(*l.gauss);
    return make_set(std::move(v));
  }
  if (!force_float && all_polar) {
    std::vector<PolarExact> v;
    for (const Literal& l : lits) v.push_back(*l.polar);
    return make_set(std::move(v));
  }
  std::vector<FloatComplex> v;
  for (const Literal& l : lits) v.push_back(l.approx);
  return make_set(std::move(v));
}

std::vector<FloatComplex> parse_complex_list(std::string_view text, std::size_t line_number) {
  std::vector<FloatComplex> v;
  for (const Literal& l : LiteralParser(text, line_number).parse_all()) v.push_back(l.approx);
  return v;
}

std::string classify_and_describe(const AnySet& s) {
  return std::visit([](const auto& set) { return describe(classify(set)); }, s);
}

}  // namespace quidd::persist
