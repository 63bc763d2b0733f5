#include "gmmcc/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace gmmcc {

Mat Mat::identity(int n) {
  Mat m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double dot(const Vec& x, const Vec& y) {
  double s = 0.0;
  for (size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

Vec matvec(const Mat& m, const Vec& x) {
  Vec y(m.rows, 0.0);
  for (int i = 0; i < m.rows; ++i) {
    double s = 0.0;
    for (int j = 0; j < m.cols; ++j) s += m(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

Mat matmul(const Mat& a, const Mat& b) {
  if (a.cols != b.rows) throw std::invalid_argument("matmul: dimension mismatch");
  Mat c(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int k = 0; k < a.cols; ++k) {
      double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Mat transpose(const Mat& m) {
  Mat t(m.cols, m.rows);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) t(j, i) = m(i, j);
  return t;
}

double frobenius_norm(const Mat& m) {
  double s = 0.0;
  for (double v : m.a) s += v * v;
  return std::sqrt(s);
}

bool cholesky(const Mat& sym, Mat& lower, double pivot_tol) {
  const int n = sym.rows;
  lower = Mat(n, n);
  for (int j = 0; j < n; ++j) {
    double d = sym(j, j);
    for (int k = 0; k < j; ++k) d -= lower(j, k) * lower(j, k);
    if (!(d > pivot_tol)) return false;
    double ljj = std::sqrt(d);
    lower(j, j) = ljj;
    for (int i = j + 1; i < n; ++i) {
      double s = sym(i, j);
      for (int k = 0; k < j; ++k) s -= lower(i, k) * lower(j, k);
      lower(i, j) = s / ljj;
    }
  }
  return true;
}

double quad_form_factor(const Mat& lower, const Vec& x) {
  const int n = lower.rows;
  double total = 0.0;
  for (int j = 0; j < n; ++j) {
    double w = 0.0;
    for (int i = j; i < n; ++i) w += lower(i, j) * x[i];
    total += w * w;
  }
  return total;
}

Vec lower_tri_apply(const Mat& lower, const Vec& g) {
  const int n = lower.rows;
  Vec y(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j <= i; ++j) s += lower(i, j) * g[j];
    y[i] = s;
  }
  return y;
}

}  // namespace gmmcc
