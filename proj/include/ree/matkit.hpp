#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "ree/errors.hpp"

namespace ree {

using Complex = std::complex<double>;

enum class Party { A, B };

// Eigenvalues below this are treated as exact zeros when a matrix function is
// restricted to the support of its argument.
inline constexpr double kSupportCutoff = 1e-14;

// Dense complex matrix, row-major. Small (n <= 16); everything is by value.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix zero(std::size_t rows, std::size_t cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  ComplexMatrix adjoint() const;
  ComplexMatrix transpose() const;
  ComplexMatrix conjugate() const;
  Complex trace() const;
  double frobenius_norm() const;
  double max_abs() const;
  bool is_hermitian(double tol) const;

  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);
  ComplexMatrix& operator*=(Complex scalar);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

ComplexMatrix operator+(ComplexMatrix lhs, const ComplexMatrix& rhs);
ComplexMatrix operator-(ComplexMatrix lhs, const ComplexMatrix& rhs);
ComplexMatrix operator*(const ComplexMatrix& lhs, const ComplexMatrix& rhs);
ComplexMatrix operator*(Complex scalar, ComplexMatrix m);

// Eigenvalues sorted descending, eigenvectors as matching orthonormal
// columns. Deterministic: cyclic sweep order, ties kept stable, and each
// vector is phased so its largest-magnitude component is real positive.
struct EigDecomposition {
  std::vector<double> values;
  ComplexMatrix vectors;
};

// Cyclic Jacobi diagonalization for Hermitian matrices. Off-diagonal
// threshold 1e-14, at most 100 sweeps.
EigDecomposition hermitian_eig(const ComplexMatrix& m);

enum class SpectralFn { Log, Sqrt };

// f applied to the eigenvalues in the eigenbasis of m (m Hermitian PSD).
// With support_only, eigenvalues below kSupportCutoff are skipped and the
// result acts as zero on the null space.
ComplexMatrix matrix_function(const ComplexMatrix& m, SpectralFn f, bool support_only = false);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

// Traces out the named party of a (dim_a*dim_b) x (dim_a*dim_b) matrix.
ComplexMatrix partial_trace(const ComplexMatrix& m, std::size_t dim_a, std::size_t dim_b,
                            Party over);

// Transposes the named party's indices.
ComplexMatrix partial_transpose(const ComplexMatrix& m, std::size_t dim_a, std::size_t dim_b,
                                Party on);

ComplexMatrix hadamard_product(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace ree
