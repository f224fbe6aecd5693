#pragma once

// Dense complex linear algebra for the small (d <= 64) Hermitian matrices
// that appear in state discrimination: a cyclic Jacobi eigensolver plus the
// spectral functions built on top of it.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qdisc/error.hpp"

namespace qdisc {

using Complex = std::complex<double>;

// Every numerical threshold used across the library.
struct Tolerances {
  double validation = 1e-9;       // PSD / trace / completeness checks
  double orthonormality = 1e-10;  // eigenvector orthonormality
  double reconstruction = 1e-9;   // U diag(l) U^H vs input, Frobenius
  double hermiticity = 1e-12;     // |a_jk - conj(a_kj)|
  double support_cutoff = 1e-9;   // eigenvalues of sum(rho_i) counted as zero
  double zero_eigenvalue = 1e-12; // lambda_ik treated as absent
  double povm_rank = 1e-10;       // eigenvalues dropped when dilating a POVM
};

inline constexpr Tolerances kTolerances{};

class ComplexMatrix {
 public:
  ComplexMatrix() = default;

  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}

  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
      : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_) {
      throw ValidationError("matrix entry count " + std::to_string(data_.size()) +
                            " does not match shape " + std::to_string(rows_) + "x" +
                            std::to_string(cols_));
    }
    for (const Complex& z : data_) {
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw ValidationError("matrix contains a non-finite entry");
      }
    }
  }

  static ComplexMatrix identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<const Complex> entries() const noexcept { return data_; }

  std::span<const Complex> row(std::size_t r) const {
    return std::span<const Complex>(data_).subspan(r * cols_, cols_);
  }

  std::vector<Complex> column(std::size_t c) const {
    std::vector<Complex> v(rows_);
    for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
    return v;
  }

  ComplexMatrix adjoint() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
    return out;
  }

  Complex trace() const {
    Complex t = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const Complex& z : data_) s += std::norm(z);
    return std::sqrt(s);
  }

  ComplexMatrix& operator+=(const ComplexMatrix& o) {
    require_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  ComplexMatrix& operator-=(const ComplexMatrix& o) {
    require_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  ComplexMatrix& operator*=(Complex s) {
    for (Complex& z : data_) z *= s;
    return *this;
  }

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
  friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }

  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols_ != b.rows_) {
      throw PreconditionError("matrix product shape mismatch: " + std::to_string(a.rows_) +
                              "x" + std::to_string(a.cols_) + " * " +
                              std::to_string(b.rows_) + "x" + std::to_string(b.cols_));
    }
    ComplexMatrix out(a.rows_, b.cols_);
    for (std::size_t r = 0; r < a.rows_; ++r) {
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const Complex ark = a(r, k);
        if (ark == Complex(0.0)) continue;
        for (std::size_t c = 0; c < b.cols_; ++c) out(r, c) += ark * b(k, c);
      }
    }
    return out;
  }

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  void require_same_shape(const ComplexMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) {
      throw PreconditionError("matrix shape mismatch in elementwise operation");
    }
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

// Square matrix equal to its conjugate transpose. Construction from an
// arbitrary matrix checks the property and then stores the exact Hermitian
// part, so downstream code can rely on a_jk == conj(a_kj) bit for bit.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;

  explicit HermitianMatrix(ComplexMatrix m, double tol = kTolerances.hermiticity) {
    if (!m.square()) {
      throw ValidationError("Hermitian matrix must be square, got " +
                            std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
    double worst = 0.0;
    for (std::size_t j = 0; j < m.rows(); ++j) {
      worst = std::max(worst, std::abs(m(j, j).imag()));
      for (std::size_t k = j + 1; k < m.cols(); ++k)
        worst = std::max(worst, std::abs(m(j, k) - std::conj(m(k, j))));
    }
    if (worst > tol) {
      throw ValidationError("matrix is not Hermitian: deviation " + std::to_string(worst));
    }
    m_ = symmetrize(std::move(m));
  }

  // (A + A^H) / 2 without any check; for results of products that are
  // Hermitian in exact arithmetic.
  static HermitianMatrix hermitian_part(const ComplexMatrix& a) {
    if (!a.square()) throw PreconditionError("Hermitian part of a non-square matrix");
    HermitianMatrix h;
    h.m_ = symmetrize(a);
    return h;
  }

  static HermitianMatrix zero(std::size_t n) { return hermitian_part(ComplexMatrix(n, n)); }
  static HermitianMatrix identity(std::size_t n) {
    return hermitian_part(ComplexMatrix::identity(n));
  }

  static HermitianMatrix diagonal(std::span<const double> values) {
    ComplexMatrix m(values.size(), values.size());
    for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
    return hermitian_part(m);
  }

  // |v><v|
  static HermitianMatrix outer(std::span<const Complex> v) {
    ComplexMatrix m(v.size(), v.size());
    for (std::size_t j = 0; j < v.size(); ++j)
      for (std::size_t k = 0; k < v.size(); ++k) m(j, k) = v[j] * std::conj(v[k]);
    return hermitian_part(m);
  }

  std::size_t dim() const noexcept { return m_.rows(); }
  const ComplexMatrix& matrix() const noexcept { return m_; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return m_(r, c); }

  double trace() const { return m_.trace().real(); }

  HermitianMatrix& operator+=(const HermitianMatrix& o) {
    m_ += o.m_;
    return *this;
  }
  HermitianMatrix& operator-=(const HermitianMatrix& o) {
    m_ -= o.m_;
    return *this;
  }
  HermitianMatrix& operator*=(double s) {
    m_ *= s;
    return *this;
  }

  friend HermitianMatrix operator+(HermitianMatrix a, const HermitianMatrix& b) { return a += b; }
  friend HermitianMatrix operator-(HermitianMatrix a, const HermitianMatrix& b) { return a -= b; }
  friend HermitianMatrix operator*(HermitianMatrix a, double s) { return a *= s; }
  friend HermitianMatrix operator*(double s, HermitianMatrix a) { return a *= s; }

  friend bool operator==(const HermitianMatrix&, const HermitianMatrix&) = default;

 private:
  static ComplexMatrix symmetrize(ComplexMatrix m) {
    for (std::size_t j = 0; j < m.rows(); ++j) {
      m(j, j) = Complex(m(j, j).real(), 0.0);
      for (std::size_t k = j + 1; k < m.cols(); ++k) {
        const Complex avg = 0.5 * (m(j, k) + std::conj(m(k, j)));
        m(j, k) = avg;
        m(k, j) = std::conj(avg);
      }
    }
    return m;
  }

  ComplexMatrix m_;
};

// A h A^H, returned as an exact Hermitian matrix. With A = W^H this
// compresses onto the column space of W; with A unitary it conjugates.
inline HermitianMatrix sandwich(const ComplexMatrix& a, const HermitianMatrix& h) {
  return HermitianMatrix::hermitian_part(a * h.matrix() * a.adjoint());
}

// Real part of Tr(A B) for Hermitian A, B.
inline double trace_product(const HermitianMatrix& a, const HermitianMatrix& b) {
  if (a.dim() != b.dim()) throw PreconditionError("trace product dimension mismatch");
  double t = 0.0;
  for (std::size_t j = 0; j < a.dim(); ++j)
    for (std::size_t k = 0; k < a.dim(); ++k) t += (a(j, k) * b(k, j)).real();
  return t;
}

struct EigDecomposition {
  std::vector<double> eigenvalues;  // descending
  ComplexMatrix eigenvectors;       // column k pairs with eigenvalues[k]
};

// Cyclic Jacobi for complex Hermitian matrices. Each rotation first removes
// the phase of the pivot a_pq and then applies a real Givens rotation, so the
// accumulated transform stays unitary to working precision.
inline EigDecomposition eigh(const HermitianMatrix& h) {
  const std::size_t n = h.dim();
  ComplexMatrix a = h.matrix();
  ComplexMatrix u = ComplexMatrix::identity(n);
  const double norm = a.frobenius_norm();
  const double stop = 1e-15 * norm;
  const double skip = 1e-17 * norm;

  for (int sweep = 0; sweep < 100 && norm > 0.0; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
    if (std::sqrt(off) <= stop) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag <= skip) continue;
        const Complex phase_conj = std::conj(apq) / mag;
        const double theta = (a(q, q).real() - a(p, p).real()) / (2.0 * mag);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const Complex jpp = c, jpq = s, jqp = -s * phase_conj, jqq = c * phase_conj;

        for (std::size_t r = 0; r < n; ++r) {
          const Complex arp = a(r, p), arq = a(r, q);
          a(r, p) = arp * jpp + arq * jqp;
          a(r, q) = arp * jpq + arq * jqq;
          const Complex urp = u(r, p), urq = u(r, q);
          u(r, p) = urp * jpp + urq * jqp;
          u(r, q) = urp * jpq + urq * jqq;
        }
        for (std::size_t col = 0; col < n; ++col) {
          const Complex apc = a(p, col), aqc = a(q, col);
          a(p, col) = std::conj(jpp) * apc + std::conj(jqp) * aqc;
          a(q, col) = std::conj(jpq) * apc + std::conj(jqq) * aqc;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return a(x, x).real() > a(y, y).real();
  });

  EigDecomposition out{std::vector<double>(n), ComplexMatrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]).real();
    for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, k) = u(r, order[k]);
  }
  return out;
}

// sum_k f(lambda_k) u_k u_k^H
template <typename F>
HermitianMatrix spectral_map(const EigDecomposition& eig, F&& f) {
  const std::size_t n = eig.eigenvectors.rows();
  const std::size_t cols = eig.eigenvalues.size();
  ComplexMatrix out(n, n);
  for (std::size_t k = 0; k < cols; ++k) {
    const double w = f(eig.eigenvalues[k]);
    if (w == 0.0) continue;
    for (std::size_t r = 0; r < n; ++r) {
      const Complex ur = w * eig.eigenvectors(r, k);
      for (std::size_t c = 0; c < n; ++c) out(r, c) += ur * std::conj(eig.eigenvectors(c, k));
    }
  }
  return HermitianMatrix::hermitian_part(out);
}

inline HermitianMatrix reconstruct(const EigDecomposition& eig) {
  return spectral_map(eig, [](double l) { return l; });
}

inline double min_eigenvalue(const HermitianMatrix& h) {
  if (h.dim() == 0) return 0.0;
  return eigh(h).eigenvalues.back();
}

inline double max_eigenvalue(const HermitianMatrix& h) {
  if (h.dim() == 0) return 0.0;
  return eigh(h).eigenvalues.front();
}

inline double trace_norm(const HermitianMatrix& a) {
  double s = 0.0;
  for (double l : eigh(a).eigenvalues) s += std::abs(l);
  return s;
}

// Inverse square root on the support: sum over lambda > cutoff of
// lambda^{-1/2} v v^H.
inline HermitianMatrix sqrt_pinv(const HermitianMatrix& h, double cutoff) {
  const EigDecomposition eig = eigh(h);
  if (!eig.eigenvalues.empty() && eig.eigenvalues.back() < -kTolerances.validation) {
    throw ValidationError("sqrt_pinv of a matrix with negative eigenvalue " +
                          std::to_string(eig.eigenvalues.back()));
  }
  return spectral_map(eig, [cutoff](double l) { return l > cutoff ? 1.0 / std::sqrt(l) : 0.0; });
}

// Principal square root with negative eigenvalues clipped to zero.
inline HermitianMatrix sqrt_psd(const HermitianMatrix& h) {
  return spectral_map(eigh(h), [](double l) { return l > 0.0 ? std::sqrt(l) : 0.0; });
}

inline HermitianMatrix clip_negative(const HermitianMatrix& h) {
  return spectral_map(eigh(h), [](double l) { return l > 0.0 ? l : 0.0; });
}

// Projector onto span of eigenvectors with eigenvalue <= cutoff.
inline HermitianMatrix kernel_projector(const EigDecomposition& eig, double cutoff) {
  return spectral_map(eig, [cutoff](double l) { return l <= cutoff ? 1.0 : 0.0; });
}

// Largest |<u_j, u_k> - delta_jk| over the columns of m.
inline double orthonormality_defect(const ComplexMatrix& m) {
  const ComplexMatrix g = m.adjoint() * m;
  double worst = 0.0;
  for (std::size_t j = 0; j < g.rows(); ++j)
    for (std::size_t k = 0; k < g.cols(); ++k)
      worst = std::max(worst, std::abs(g(j, k) - Complex(j == k ? 1.0 : 0.0)));
  return worst;
}

}  // namespace qdisc
