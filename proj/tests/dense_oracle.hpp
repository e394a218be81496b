#pragma once

// Straightforward dense linear algebra used as the reference in tests.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace dense {

using cx = std::complex<double>;
using Vec = std::vector<cx>;

// Row-major square matrix.
struct Mat {
  std::size_t dim = 0;
  std::vector<cx> a;

  explicit Mat(std::size_t d = 0) : dim(d), a(d * d) {}
  cx& operator()(std::size_t r, std::size_t c) { return a[r * dim + c]; }
  cx operator()(std::size_t r, std::size_t c) const { return a[r * dim + c]; }
};

inline Mat from_flat(std::size_t dim, const std::vector<cx>& flat) {
  Mat m(dim);
  m.a = flat;
  return m;
}

inline Mat eye(std::size_t dim) {
  Mat m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

inline Mat mul(const Mat& x, const Mat& y) {
  Mat z(x.dim);
  for (std::size_t i = 0; i < x.dim; ++i)
    for (std::size_t k = 0; k < x.dim; ++k) {
      const cx v = x(i, k);
      if (v == cx{}) continue;
      for (std::size_t j = 0; j < x.dim; ++j) z(i, j) += v * y(k, j);
    }
  return z;
}

inline Vec mul(const Mat& x, const Vec& v) {
  Vec out(x.dim);
  for (std::size_t i = 0; i < x.dim; ++i)
    for (std::size_t k = 0; k < x.dim; ++k) out[i] += x(i, k) * v[k];
  return out;
}

inline Mat kron(const Mat& x, const Mat& y) {
  Mat z(x.dim * y.dim);
  for (std::size_t i = 0; i < x.dim; ++i)
    for (std::size_t j = 0; j < x.dim; ++j)
      for (std::size_t k = 0; k < y.dim; ++k)
        for (std::size_t l = 0; l < y.dim; ++l) z(i * y.dim + k, j * y.dim + l) = x(i, j) * y(k, l);
  return z;
}

inline Vec kron(const Vec& x, const Vec& y) {
  Vec z(x.size() * y.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t k = 0; k < y.size(); ++k) z[i * y.size() + k] = x[i] * y[k];
  return z;
}

inline cx dot(const Vec& u, const Vec& v) {
  cx s{};
  for (std::size_t i = 0; i < u.size(); ++i) s += std::conj(u[i]) * v[i];
  return s;
}

inline double max_diff(const std::vector<cx>& a, const std::vector<cx>& b) {
  if (a.size() != b.size()) return INFINITY;
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

// Entries drawn from a small palette so that random diagrams share
// structure, plus occasional generic values.
inline cx random_entry(std::mt19937_64& rng) {
  static const cx palette[] = {0.0, 1.0, -1.0, 0.5, {0.0, 1.0}, {0.25, -0.75}};
  std::uniform_int_distribution<int> pick(0, 7);
  const int k = pick(rng);
  if (k < 6) return palette[k];
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return {u(rng), u(rng)};
}

inline Vec random_vec(std::size_t dim, std::mt19937_64& rng) {
  Vec v(dim);
  for (auto& x : v) x = random_entry(rng);
  return v;
}

inline Mat random_mat(std::size_t dim, std::mt19937_64& rng) {
  Mat m(dim);
  for (auto& x : m.a) x = random_entry(rng);
  return m;
}

}  // namespace dense
