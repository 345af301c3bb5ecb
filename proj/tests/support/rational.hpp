#pragma once

#include <numeric>
#include <stdexcept>
#include <vector>

// Exact rational linear algebra, used as an independent oracle for the power
// iteration: solves x R = x, sum(x) = 1 by Gaussian elimination.
namespace rational {

struct Frac {
  long long num = 0;
  long long den = 1;

  Frac() = default;
  Frac(long long n) : num(n), den(1) {}
  Frac(long long n, long long d) : num(n), den(d) { normalize(); }

  void normalize() {
    if (den == 0) throw std::runtime_error("zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  static Frac make(__int128 n, __int128 d) {
    if (d < 0) {
      n = -n;
      d = -d;
    }
    __int128 a = n < 0 ? -n : n;
    __int128 g = 1;
    {
      __int128 x = a, y = d;
      while (y != 0) {
        __int128 r = x % y;
        x = y;
        y = r;
      }
      g = x == 0 ? 1 : x;
    }
    n /= g;
    d /= g;
    if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX)
      throw std::runtime_error("rational overflow");
    Frac f;
    f.num = static_cast<long long>(n);
    f.den = static_cast<long long>(d);
    return f;
  }

  friend Frac operator+(const Frac& a, const Frac& b) {
    return make(static_cast<__int128>(a.num) * b.den + static_cast<__int128>(b.num) * a.den,
                static_cast<__int128>(a.den) * b.den);
  }
  friend Frac operator-(const Frac& a, const Frac& b) {
    return make(static_cast<__int128>(a.num) * b.den - static_cast<__int128>(b.num) * a.den,
                static_cast<__int128>(a.den) * b.den);
  }
  friend Frac operator*(const Frac& a, const Frac& b) {
    return make(static_cast<__int128>(a.num) * b.num, static_cast<__int128>(a.den) * b.den);
  }
  friend Frac operator/(const Frac& a, const Frac& b) {
    if (b.num == 0) throw std::runtime_error("division by zero");
    return make(static_cast<__int128>(a.num) * b.den, static_cast<__int128>(a.den) * b.num);
  }
  friend bool operator==(const Frac& a, const Frac& b) {
    return a.num == b.num && a.den == b.den;
  }
  bool is_zero() const { return num == 0; }
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// Left fixed point of R with entries R[i][j]: replaces the last eigen
// equation by the normalization and verifies the dropped one afterwards.
inline std::vector<Frac> solve_left_fixed_point(const std::vector<std::vector<Frac>>& R) {
  size_t n = R.size();
  std::vector<std::vector<Frac>> A(n, std::vector<Frac>(n + 1, Frac(0)));
  for (size_t j = 0; j + 1 < n; ++j) {
    for (size_t i = 0; i < n; ++i) {
      A[j][i] = R[i][j];
      if (i == j) A[j][i] = A[j][i] - Frac(1);
    }
  }
  for (size_t i = 0; i < n; ++i) A[n - 1][i] = Frac(1);
  A[n - 1][n] = Frac(1);

  for (size_t col = 0, row = 0; col < n && row < n; ++col) {
    size_t pivot = row;
    while (pivot < n && A[pivot][col].is_zero()) ++pivot;
    if (pivot == n) throw std::runtime_error("singular system");
    std::swap(A[pivot], A[row]);
    Frac inv = Frac(1) / A[row][col];
    for (size_t k = col; k <= n; ++k) A[row][k] = A[row][k] * inv;
    for (size_t r = 0; r < n; ++r) {
      if (r == row || A[r][col].is_zero()) continue;
      Frac factor = A[r][col];
      for (size_t k = col; k <= n; ++k) A[r][k] = A[r][k] - factor * A[row][k];
    }
    ++row;
  }
  std::vector<Frac> x(n);
  for (size_t i = 0; i < n; ++i) x[i] = A[i][n];

  // The dropped equation must hold as well.
  Frac lhs(0);
  for (size_t i = 0; i < n; ++i) lhs = lhs + x[i] * R[i][n - 1];
  if (!(lhs == x[n - 1])) throw std::runtime_error("dropped eigen equation violated");
  return x;
}

}  // namespace rational
