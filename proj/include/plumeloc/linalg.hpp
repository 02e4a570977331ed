#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace plumeloc {

/// Dense square matrix, row-major. Just enough linear algebra for the
/// proposal kernels; dimensions never exceed the largest parameter vector.
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n) : n_(n), a_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

  double trace() const;

  friend bool operator==(const SquareMatrix&, const SquareMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> a_;
};

/// Lower-triangular Cholesky factor of a symmetric matrix. Returns false if
/// the matrix is not positive definite (left partially written in that case).
bool cholesky_lower(const SquareMatrix& a, SquareMatrix& lower);

/// Solves lower * y = b by forward substitution.
void forward_substitute(const SquareMatrix& lower, std::span<const double> b,
                        std::span<double> y);

/// out = lower * v, using only the lower triangle.
void lower_matvec(const SquareMatrix& lower, std::span<const double> v,
                  std::span<double> out);

}  // namespace plumeloc
