#include "ree/matkit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ree {

namespace {

void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    std::ostringstream msg;
    msg << op << ": shape mismatch (" << a.rows() << "x" << a.cols() << " vs " << b.rows() << "x"
        << b.cols() << ")";
    throw DimensionError(msg.str());
  }
}

}  // namespace

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::zero(std::size_t rows, std::size_t cols) {
  return ComplexMatrix(rows, cols);
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
  return out;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

ComplexMatrix ComplexMatrix::conjugate() const {
  ComplexMatrix out(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(i, j) = std::conj((*this)(i, j));
  return out;
}

Complex ComplexMatrix::trace() const {
  if (rows_ != cols_) throw DimensionError("trace: matrix not square");
  Complex t = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
  return t;
}

double ComplexMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const Complex& z : data_) s += std::norm(z);
  return std::sqrt(s);
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (const Complex& z : data_) m = std::max(m, std::abs(z));
  return m;
}

bool ComplexMatrix::is_hermitian(double tol) const {
  if (rows_ != cols_) return false;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = i; j < cols_; ++j)
      if (std::abs((*this)(i, j) - std::conj((*this)(j, i))) > tol) return false;
  return true;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  require_same_shape(*this, other, "add");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  require_same_shape(*this, other, "subtract");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex scalar) {
  for (Complex& z : data_) z *= scalar;
  return *this;
}

ComplexMatrix operator+(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs += rhs; }
ComplexMatrix operator-(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs -= rhs; }

ComplexMatrix operator*(const ComplexMatrix& lhs, const ComplexMatrix& rhs) {
  if (lhs.cols() != rhs.rows()) throw DimensionError("multiply: inner dimensions disagree");
  ComplexMatrix out(lhs.rows(), rhs.cols());
  for (std::size_t i = 0; i < lhs.rows(); ++i) {
    for (std::size_t k = 0; k < lhs.cols(); ++k) {
      const Complex v = lhs(i, k);
      if (v == Complex(0.0)) continue;
      for (std::size_t j = 0; j < rhs.cols(); ++j) out(i, j) += v * rhs(k, j);
    }
  }
  return out;
}

ComplexMatrix operator*(Complex scalar, ComplexMatrix m) { return m *= scalar; }

EigDecomposition hermitian_eig(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("hermitian_eig: matrix not square");
  if (!m.is_hermitian(1e-10)) throw InputError("hermitian_eig: matrix not Hermitian within 1e-10");

  const std::size_t n = m.rows();
  // Work on the exactly Hermitian part so the update formulas stay symmetric.
  ComplexMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      a(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
  ComplexMatrix v = ComplexMatrix::identity(n);

  constexpr double kOffTol = 1e-14;
  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
    if (off <= kOffTol) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex z = a(p, q);
        const double r = std::abs(z);
        if (r <= kOffTol) continue;
        const Complex phase = z / r;

        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double tau = (aqq - app) / (2.0 * r);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const Complex akp = a(k, p);
          const Complex akq = a(k, q);
          a(k, p) = c * akp - s * std::conj(phase) * akq;
          a(k, q) = s * phase * akp + c * akq;
          a(p, k) = std::conj(a(k, p));
          a(q, k) = std::conj(a(k, q));
        }
        a(p, p) = c * c * app - 2.0 * s * c * r + s * s * aqq;
        a(q, q) = s * s * app + 2.0 * s * c * r + c * c * aqq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;

        for (std::size_t k = 0; k < n; ++k) {
          const Complex vkp = v(k, p);
          const Complex vkq = v(k, q);
          v(k, p) = c * vkp - s * std::conj(phase) * vkq;
          v(k, q) = s * phase * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() > a(j, j).real(); });

  EigDecomposition out;
  out.values.resize(n);
  out.vectors = ComplexMatrix(n, n);
  for (std::size_t col = 0; col < n; ++col) {
    const std::size_t src = order[col];
    out.values[col] = a(src, src).real();
    // Phase convention: largest-magnitude component real positive.
    std::size_t kmax = 0;
    double best = -1.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double mag = std::abs(v(k, src));
      if (mag > best) {
        best = mag;
        kmax = k;
      }
    }
    const Complex pivot = v(kmax, src);
    const Complex fix = (std::abs(pivot) > 0.0) ? std::conj(pivot) / std::abs(pivot) : Complex(1.0);
    for (std::size_t k = 0; k < n; ++k) out.vectors(k, col) = v(k, src) * fix;
  }
  return out;
}

ComplexMatrix matrix_function(const ComplexMatrix& m, SpectralFn f, bool support_only) {
  const EigDecomposition eig = hermitian_eig(m);
  const std::size_t n = m.rows();

  const double min_eig = eig.values.empty() ? 0.0 : eig.values.back();
  if (min_eig < -1e-10) {
    std::ostringstream msg;
    msg << "matrix_function: input not PSD (min eigenvalue " << min_eig << ")";
    throw NotPsdError(msg.str());
  }
  if (f == SpectralFn::Log && !support_only && min_eig <= kSupportCutoff) {
    std::ostringstream msg;
    msg << "matrix_function: log of singular matrix (min eigenvalue " << min_eig << ")";
    throw SingularityError(msg.str());
  }

  std::vector<double> fv(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double lambda = std::max(eig.values[i], 0.0);
    if (support_only && lambda < kSupportCutoff) continue;
    fv[i] = (f == SpectralFn::Log) ? std::log(lambda) : std::sqrt(lambda);
  }

  ComplexMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (fv[i] == 0.0) continue;
    for (std::size_t r = 0; r < n; ++r) {
      const Complex vr = eig.vectors(r, i) * fv[i];
      for (std::size_t c = 0; c < n; ++c) out(r, c) += vr * std::conj(eig.vectors(c, i));
    }
  }
  return out;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const Complex v = a(i, j);
      if (v == Complex(0.0)) continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = v * b(k, l);
    }
  return out;
}

namespace {

void require_bipartite(const ComplexMatrix& m, std::size_t dim_a, std::size_t dim_b,
                       const char* op) {
  if (m.rows() != m.cols() || m.rows() != dim_a * dim_b) {
    std::ostringstream msg;
    msg << op << ": matrix is " << m.rows() << "x" << m.cols() << " but dims are (" << dim_a
        << "," << dim_b << ")";
    throw DimensionError(msg.str());
  }
}

}  // namespace

ComplexMatrix partial_trace(const ComplexMatrix& m, std::size_t dim_a, std::size_t dim_b,
                            Party over) {
  require_bipartite(m, dim_a, dim_b, "partial_trace");
  if (over == Party::A) {
    ComplexMatrix out(dim_b, dim_b);
    for (std::size_t b1 = 0; b1 < dim_b; ++b1)
      for (std::size_t b2 = 0; b2 < dim_b; ++b2) {
        Complex s = 0.0;
        for (std::size_t a = 0; a < dim_a; ++a) s += m(a * dim_b + b1, a * dim_b + b2);
        out(b1, b2) = s;
      }
    return out;
  }
  ComplexMatrix out(dim_a, dim_a);
  for (std::size_t a1 = 0; a1 < dim_a; ++a1)
    for (std::size_t a2 = 0; a2 < dim_a; ++a2) {
      Complex s = 0.0;
      for (std::size_t b = 0; b < dim_b; ++b) s += m(a1 * dim_b + b, a2 * dim_b + b);
      out(a1, a2) = s;
    }
  return out;
}

ComplexMatrix partial_transpose(const ComplexMatrix& m, std::size_t dim_a, std::size_t dim_b,
                                Party on) {
  require_bipartite(m, dim_a, dim_b, "partial_transpose");
  ComplexMatrix out(m.rows(), m.cols());
  for (std::size_t a1 = 0; a1 < dim_a; ++a1)
    for (std::size_t b1 = 0; b1 < dim_b; ++b1)
      for (std::size_t a2 = 0; a2 < dim_a; ++a2)
        for (std::size_t b2 = 0; b2 < dim_b; ++b2) {
          if (on == Party::B)
            out(a1 * dim_b + b1, a2 * dim_b + b2) = m(a1 * dim_b + b2, a2 * dim_b + b1);
          else
            out(a1 * dim_b + b1, a2 * dim_b + b2) = m(a2 * dim_b + b1, a1 * dim_b + b2);
        }
  return out;
}

ComplexMatrix hadamard_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_shape(a, b, "hadamard_product");
  ComplexMatrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) * b(i, j);
  return out;
}

}  // namespace ree
