#pragma once

#include <algorithm>
#include <cmath>
#include <ostream>
#include <vector>

#include "errors.hpp"
#include "format.hpp"
#include "parallel.hpp"

namespace dodecawave {

using Vector = std::vector<double>;

inline double dot(const Vector& a, const Vector& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Vector& a) { return std::sqrt(dot(a, a)); }

// Compressed sparse rows with sorted column indices.
struct CsrMatrix {
  std::size_t n = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<int> col;
  Vector val;

  std::size_t nnz() const { return col.size(); }

  double& at(std::size_t i, int j) {
    auto b = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[i]);
    auto e = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[i + 1]);
    auto it = std::lower_bound(b, e, j);
    if (it == e || *it != j) throw AssemblyError("entry outside the sparsity pattern");
    return val[static_cast<std::size_t>(it - col.begin())];
  }

  double get(std::size_t i, int j) const {
    auto b = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[i]);
    auto e = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[i + 1]);
    auto it = std::lower_bound(b, e, j);
    return (it == e || *it != j) ? 0.0 : val[static_cast<std::size_t>(it - col.begin())];
  }

  void multiply(const Vector& x, Vector& y) const {
    y.resize(n);
    parallel_for(n, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        double s = 0;
        for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += val[k] * x[col[k]];
        y[i] = s;
      }
    });
  }

  Vector operator*(const Vector& x) const {
    Vector y;
    multiply(x, y);
    return y;
  }

  Vector diagonal() const {
    Vector d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = get(i, static_cast<int>(i));
    return d;
  }

  // Largest absolute row sum.
  double norm_inf() const {
    double m = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0;
      for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += std::fabs(val[k]);
      m = std::max(m, s);
    }
    return m;
  }

  double asymmetry() const {
    double m = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
        m = std::max(m, std::fabs(val[k] - get(static_cast<std::size_t>(col[k]), static_cast<int>(i))));
    return m;
  }

  // Same pattern, values a*this + b*other.
  CsrMatrix combine(double a, const CsrMatrix& other, double b) const {
    CsrMatrix r = *this;
    for (std::size_t k = 0; k < val.size(); ++k) r.val[k] = a * val[k] + b * other.val[k];
    return r;
  }

  void write_coo(std::ostream& os) const {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) os << i << ' ' << col[k] << ' ' << fmt17(val[k]) << '\n';
  }
};

struct CgResult {
  int iterations = 0;
  double relative_residual = 0;
};

// Jacobi-preconditioned conjugate gradients; x holds the initial guess on entry.
inline CgResult conjugate_gradient(const CsrMatrix& A, const Vector& inv_diag, const Vector& b, Vector& x,
                                   double rel_tol = 1e-12, int max_iter = 2000) {
  const std::size_t n = A.n;
  x.resize(n, 0.0);
  CgResult res;
  double bnorm = norm2(b);
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    return res;
  }
  Vector r(n), z(n), p(n), Ap(n);
  A.multiply(x, Ap);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - Ap[i];
  double rnorm = norm2(r);
  if (rnorm <= rel_tol * bnorm) {
    res.relative_residual = rnorm / bnorm;
    return res;
  }
  for (std::size_t i = 0; i < n; ++i) p[i] = z[i] = inv_diag[i] * r[i];
  double rz = dot(r, z);
  for (int it = 1; it <= max_iter; ++it) {
    A.multiply(p, Ap);
    double alpha = rz / dot(p, Ap);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * Ap[i];
    }
    rnorm = norm2(r);
    if (rnorm <= rel_tol * bnorm) {
      res.iterations = it;
      res.relative_residual = rnorm / bnorm;
      return res;
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    double rz_new = dot(r, z);
    double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  throw NumericalError("conjugate gradient did not converge in " + std::to_string(max_iter) +
                       " iterations (relative residual " + fmt17(rnorm / bnorm) + ")");
}

}  // namespace dodecawave
