#include "plumeloc/linalg.hpp"

#include <cmath>

namespace plumeloc {

double SquareMatrix::trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
  return t;
}

bool cholesky_lower(const SquareMatrix& a, SquareMatrix& lower) {
  const std::size_t n = a.size();
  lower = SquareMatrix(n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = a(j, j);
    for (std::size_t k = 0; k < j; ++k) s -= lower(j, k) * lower(j, k);
    if (!(s > 0.0) || !std::isfinite(s)) return false;
    const double diag = std::sqrt(s);
    lower(j, j) = diag;
    for (std::size_t i = j + 1; i < n; ++i) {
      double t = a(i, j);
      for (std::size_t k = 0; k < j; ++k) t -= lower(i, k) * lower(j, k);
      lower(i, j) = t / diag;
    }
  }
  return true;
}

void forward_substitute(const SquareMatrix& lower, std::span<const double> b,
                        std::span<double> y) {
  const std::size_t n = lower.size();
  for (std::size_t i = 0; i < n; ++i) {
    double t = b[i];
    for (std::size_t k = 0; k < i; ++k) t -= lower(i, k) * y[k];
    y[i] = t / lower(i, i);
  }
}

void lower_matvec(const SquareMatrix& lower, std::span<const double> v,
                  std::span<double> out) {
  const std::size_t n = lower.size();
  for (std::size_t i = 0; i < n; ++i) {
    double t = 0.0;
    for (std::size_t k = 0; k <= i; ++k) t += lower(i, k) * v[k];
    out[i] = t;
  }
}

}  // namespace plumeloc
