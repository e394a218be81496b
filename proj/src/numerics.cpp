#include "quidd/numerics.hpp"

#include <cstring>
#include <sstream>
#include <stdexcept>
#include <string>

namespace quidd {

Real::Real(unsigned bits) {
  mpfr_init2(v_, static_cast<mpfr_prec_t>(bits));
  mpfr_set_zero(v_, 1);
}

Real::Real(double v, unsigned bits) {
  mpfr_init2(v_, static_cast<mpfr_prec_t>(bits));
  mpfr_set_d(v_, v, MPFR_RNDN);
}

Real::Real(const Real& other) {
  mpfr_init2(v_, mpfr_get_prec(other.v_));
  mpfr_set(v_, other.v_, MPFR_RNDN);
}

Real::Real(Real&& other) noexcept {
  std::memcpy(v_, other.v_, sizeof(mpfr_t));
  other.live_ = false;
}

Real& Real::operator=(const Real& other) {
  if (this == &other) return *this;
  if (!live_) {
    mpfr_init2(v_, mpfr_get_prec(other.v_));
    live_ = true;
  } else {
    mpfr_set_prec(v_, mpfr_get_prec(other.v_));
  }
  mpfr_set(v_, other.v_, MPFR_RNDN);
  return *this;
}

Real& Real::operator=(Real&& other) noexcept {
  if (this == &other) return *this;
  if (live_) mpfr_clear(v_);
  std::memcpy(v_, other.v_, sizeof(mpfr_t));
  live_ = true;
  other.live_ = false;
  return *this;
}

Real::~Real() {
  if (live_) mpfr_clear(v_);
}

Real Real::parse(std::string_view text, unsigned bits) {
  std::string s(text);
  Real r(bits);
  char* end = nullptr;
  if (!s.empty()) mpfr_strtofr(r.v_, s.c_str(), &end, 10, MPFR_RNDN);
  if (s.empty() || end == s.c_str() || *end != '\0') {
    throw std::invalid_argument("not a real number: '" + s + "'");
  }
  return r;
}

Real Real::pi(unsigned bits) {
  Real r(bits);
  mpfr_const_pi(r.v_, MPFR_RNDN);
  return r;
}

std::string Real::to_string(int digits) const {
  if (is_zero()) return "0";
  std::string fmt = "%." + std::to_string(digits) + "Rg";
  int len = mpfr_snprintf(nullptr, 0, fmt.c_str(), v_);
  std::string out(static_cast<std::size_t>(len) + 1, '\0');
  mpfr_snprintf(out.data(), out.size(), fmt.c_str(), v_);
  out.resize(static_cast<std::size_t>(len));
  return out;
}

long Real::exponent2() const { return is_zero() ? 0 : static_cast<long>(mpfr_get_exp(v_)); }

namespace {

unsigned wider(const Real& a, const Real& b) { return std::max(a.precision(), b.precision()); }

}  // namespace

Real Real::operator-() const {
  Real r(precision());
  mpfr_neg(r.v_, v_, MPFR_RNDN);
  return r;
}

Real operator+(const Real& a, const Real& b) {
  Real r(wider(a, b));
  mpfr_add(r.v_, a.v_, b.v_, MPFR_RNDN);
  return r;
}

Real operator-(const Real& a, const Real& b) {
  Real r(wider(a, b));
  mpfr_sub(r.v_, a.v_, b.v_, MPFR_RNDN);
  return r;
}

Real operator*(const Real& a, const Real& b) {
  Real r(wider(a, b));
  mpfr_mul(r.v_, a.v_, b.v_, MPFR_RNDN);
  return r;
}

Real operator/(const Real& a, const Real& b) {
  Real r(wider(a, b));
  mpfr_div(r.v_, a.v_, b.v_, MPFR_RNDN);
  return r;
}

Real& Real::operator+=(const Real& b) {
  if (b.precision() > precision()) mpfr_prec_round(v_, mpfr_get_prec(b.v_), MPFR_RNDN);
  mpfr_add(v_, v_, b.v_, MPFR_RNDN);
  return *this;
}

Real& Real::operator*=(const Real& b) {
  if (b.precision() > precision()) mpfr_prec_round(v_, mpfr_get_prec(b.v_), MPFR_RNDN);
  mpfr_mul(v_, v_, b.v_, MPFR_RNDN);
  return *this;
}

Real Real::abs() const {
  Real r(precision());
  mpfr_abs(r.v_, v_, MPFR_RNDN);
  return r;
}

Real Real::sqrt() const {
  if (sign() < 0) throw std::domain_error("sqrt of a negative real");
  Real r(precision());
  mpfr_sqrt(r.v_, v_, MPFR_RNDN);
  return r;
}

Real Real::ldexp(long e) const {
  Real r(precision());
  mpfr_mul_2si(r.v_, v_, e, MPFR_RNDN);
  return r;
}

Real Real::rounded(unsigned bits) const {
  Real r(bits);
  mpfr_set(r.v_, v_, MPFR_RNDN);
  return r;
}

Complex operator+(const Complex& a, const Complex& b) { return {a.re_ + b.re_, a.im_ + b.im_}; }

Complex operator-(const Complex& a, const Complex& b) { return {a.re_ - b.re_, a.im_ - b.im_}; }

Complex operator*(const Complex& a, const Complex& b) {
  if (a.im_.is_zero() && b.im_.is_zero()) {
    return {a.re_ * b.re_, Real(wider(a.im_, b.im_))};
  }
  return {a.re_ * b.re_ - a.im_ * b.im_, a.re_ * b.im_ + a.im_ * b.re_};
}

Complex operator/(const Complex& a, const Complex& b) {
  if (b.is_zero()) throw std::domain_error("complex division by zero");
  if (b.im_.is_zero()) return a / b.re_;
  Real d = b.norm();
  return {(a.re_ * b.re_ + a.im_ * b.im_) / d, (a.im_ * b.re_ - a.re_ * b.im_) / d};
}

std::string Complex::to_string(int digits) const {
  if (im_.is_zero()) return re_.to_string(digits);
  std::string im = im_.abs().to_string(digits);
  if (im == "1") im.clear();
  if (re_.is_zero()) return (im_.sign() < 0 ? "-" : "") + im + "i";
  return re_.to_string(digits) + (im_.sign() < 0 ? "-" : "+") + im + "i";
}

Complex root_of_unity(long k, long n, unsigned bits) {
  if (n <= 0) throw std::invalid_argument("root_of_unity: order must be positive");
  k %= n;
  if (k < 0) k += n;
  // Quarter turns plus a remainder angle (pi/2) * rem / n with rem in [0, n).
  const long long k4 = 4LL * k;
  const long quarter = static_cast<long>(k4 / n);
  const long long rem = k4 - static_cast<long long>(quarter) * n;

  Real c(bits), s(bits);
  if (rem == 0) {
    c = Real(1.0, bits);
  } else if (2 * rem == n) {
    c = Real(0.5, bits).sqrt();
    s = c;
  } else {
    const bool upper = 2 * rem > n;
    const long long r = upper ? n - rem : rem;
    Real angle = Real::pi(bits + 16) * Real(static_cast<double>(r), bits + 16) /
                 Real(2.0 * static_cast<double>(n), bits + 16);
    Real sa(bits), ca(bits);
    mpfr_sin_cos(sa.get(), ca.get(), angle.get(), MPFR_RNDN);
    if (upper) {
      c = std::move(sa);
      s = std::move(ca);
    } else {
      c = std::move(ca);
      s = std::move(sa);
    }
  }
  for (long q = 0; q < quarter; ++q) {
    Real t = -s;
    s = c;
    c = std::move(t);
  }
  return {std::move(c), std::move(s)};
}

Real inv_sqrt2_pow(long e, unsigned bits) {
  Real r = Real(1.0, bits).ldexp(-(e / 2));
  if (e % 2 != 0) r = r * Real(0.5, bits).sqrt();
  return r;
}

std::string PrecisionConfig::describe() const {
  std::ostringstream out;
  out << "precision-bits=" << mantissa_bits << " epsilon=" << merge_epsilon
      << " mode=" << (comparison_mode == ComparisonMode::relative ? "relative" : "absolute");
  return out.str();
}

bool dedup_equal(const Complex& a, const Complex& b, const PrecisionConfig& cfg) {
  if (cfg.merge_epsilon == 0.0) return a == b;
  const unsigned bits = std::max(a.precision(), b.precision());
  Real diff = (a - b).norm();
  Real eps(cfg.merge_epsilon, bits);
  Real bound = eps * eps;
  if (cfg.comparison_mode == ComparisonMode::relative) {
    Real na = a.norm(), nb = b.norm();
    bound = bound * (na < nb ? nb : na);
  }
  return diff <= bound;
}

namespace {

const PrecisionConfig& validated(const PrecisionConfig& cfg) {
  if (cfg.mantissa_bits < 8 || cfg.mantissa_bits > (1u << 20)) {
    throw std::invalid_argument("mantissa bits must lie in [8, 2^20]");
  }
  if (!(cfg.merge_epsilon >= 0.0) || cfg.merge_epsilon >= 1.0) {
    throw std::invalid_argument("merge epsilon must lie in [0, 1)");
  }
  return cfg;
}

}  // namespace

TerminalTable::TerminalTable(PrecisionConfig cfg)
    : cfg_(validated(cfg)),
      eps_(cfg.merge_epsilon, cfg.mantissa_bits),
      eps_sq_(eps_ * eps_) {}

std::pair<TerminalTable::Index::const_iterator, TerminalTable::Index::const_iterator>
TerminalTable::window(const Complex& v) const {
  if (eps_.is_zero()) return by_re_.equal_range(v.re());
  Real w = eps_;
  if (cfg_.comparison_mode == ComparisonMode::relative) {
    // A match u has |u| <= |v| + tol, so tol <= eps |v| / (1 - eps).
    Real one(1.0, cfg_.mantissa_bits);
    w = eps_ * v.abs() / (one - eps_);
    w = w + w.ldexp(-20);
  }
  return {by_re_.lower_bound(v.re() - w), by_re_.upper_bound(v.re() + w)};
}

std::optional<std::uint32_t> TerminalTable::find(const Complex& v) const {
  auto [lo, hi] = window(v);
  std::optional<std::uint32_t> best;
  if (eps_.is_zero()) {
    for (auto it = lo; it != hi; ++it) {
      if ((!best || it->second < *best) && slots_[it->second]->value.im() == v.im()) {
        best = it->second;
      }
    }
    return best;
  }
  const bool relative = cfg_.comparison_mode == ComparisonMode::relative;
  const Real nv = v.norm();
  for (auto it = lo; it != hi; ++it) {
    if (best && it->second > *best) continue;
    const Complex& u = slots_[it->second]->value;
    Real bound = eps_sq_;
    if (relative) {
      Real nu = u.norm();
      bound = bound * (nu < nv ? nv : nu);
    }
    if ((u - v).norm() <= bound) best = it->second;
  }
  return best;
}

std::uint32_t TerminalTable::intern(const Complex& v) {
  Complex value = v.precision() == cfg_.mantissa_bits &&
                          v.re().precision() == v.im().precision()
                      ? v
                      : v.rounded(cfg_.mantissa_bits);
  if (auto hit = find(value)) return *hit;
  const auto index = static_cast<std::uint32_t>(slots_.size());
  auto slot = std::make_unique<Slot>(Slot{std::move(value), {}});
  slot->where = by_re_.emplace(slot->value.re(), index);
  slots_.push_back(std::move(slot));
  ++live_;
  return index;
}

void TerminalTable::release(std::uint32_t index) {
  if (!contains(index)) return;
  by_re_.erase(slots_[index]->where);
  slots_[index].reset();
  --live_;
}

std::size_t TerminalTable::approx_bytes() const {
  const std::size_t limbs = (cfg_.mantissa_bits + 63) / 64 * 8;
  const std::size_t per_value = sizeof(Slot) + 2 * limbs + sizeof(Real) + limbs + 64;
  return live_ * per_value + slots_.size() * sizeof(void*);
}

}  // namespace quidd
