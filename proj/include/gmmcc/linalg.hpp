#pragma once

#include <cstddef>
#include <vector>

namespace gmmcc {

using Vec = std::vector<double>;

// Dense row-major matrix, sized for the n <= 1000 instances this library
// generates.
struct Mat {
  int rows = 0, cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}

  double& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

  static Mat identity(int n);
};

double dot(const Vec& x, const Vec& y);
Vec matvec(const Mat& m, const Vec& x);
Mat matmul(const Mat& a, const Mat& b);
Mat transpose(const Mat& m);
double frobenius_norm(const Mat& m);

// Lower-triangular Cholesky factor of a symmetric matrix. Returns false when
// a pivot falls below pivot_tol (matrix not positive definite at tolerance).
bool cholesky(const Mat& sym, Mat& lower, double pivot_tol);

// |L^T x|^2 evaluated from the cached factor; equals x' Sigma x but is stable
// for small x.
double quad_form_factor(const Mat& lower, const Vec& x);

// y = L g for lower-triangular L.
Vec lower_tri_apply(const Mat& lower, const Vec& g);

}  // namespace gmmcc
