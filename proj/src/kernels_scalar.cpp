#include <cmath>

#include "sqflow/kernels.hpp"

// Reference semantics for every kernel. SIMD variants must match these
// bitwise, so min/max mirror the x86 vector instructions: max(a,b) keeps
// b when a <= b, min(a,b) keeps b when a >= b (inputs are NaN-free).

namespace sqflow::kernels {
namespace {

inline double vmax(double a, double b) { return (a > b) ? a : b; }
inline double vmin(double a, double b) { return (a < b) ? a : b; }

// Descending sort network on four values (same compare-exchange sequence
// as the AVX2 lane-wise network).
inline void sort4_desc(double& a, double& b, double& c, double& d) {
  double h1 = vmax(a, b), l1 = vmin(a, b);
  double h2 = vmax(c, d), l2 = vmin(c, d);
  double v0 = vmax(h1, h2), x = vmin(h1, h2);
  double y = vmax(l1, l2), v3 = vmin(l1, l2);
  a = v0;
  b = vmax(x, y);
  c = vmin(x, y);
  d = v3;
}

double dot_orbits_scalar(const double* x, const double* y, const OrbitList& o) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  const size_t m = o.count();
  for (size_t k = 0; k < m; ++k) {
    double v0 = x[o.i0[k]] * y[o.i0[k]];
    double v1 = x[o.i1[k]] * y[o.i1[k]];
    double v2 = x[o.i2[k]] * y[o.i2[k]];
    double v3 = x[o.i3[k]] * y[o.i3[k]];
    sort4_desc(v0, v1, v2, v3);
    acc[k & 3] += ((v0 + v1) + v2) + v3;
  }
  if (o.center >= 0) acc[m & 3] += x[o.center] * y[o.center];
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

double sum_orbits_scalar(const double* x, const OrbitList& o) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  const size_t m = o.count();
  for (size_t k = 0; k < m; ++k) {
    double v0 = x[o.i0[k]];
    double v1 = x[o.i1[k]];
    double v2 = x[o.i2[k]];
    double v3 = x[o.i3[k]];
    sort4_desc(v0, v1, v2, v3);
    acc[k & 3] += ((v0 + v1) + v2) + v3;
  }
  if (o.center >= 0) acc[m & 3] += x[o.center];
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

void wet_laplacian_row_scalar(double* y, const double* x, const double* xn, const double* xs,
                              const double* m, const double* d, double inv_dx2, int len) {
  for (int i = 0; i < len; ++i) {
    double lap = (d[i] * x[i] - ((xn[i] + xs[i]) + (x[i - 1] + x[i + 1]))) * inv_dx2;
    y[i] = m[i] * lap + (1.0 - m[i]) * x[i];
  }
}

void axpy_scalar(double* y, double a, const double* x, int len) {
  for (int i = 0; i < len; ++i) y[i] = y[i] + a * x[i];
}

void xpay_scalar(double* p, const double* z, double beta, int len) {
  for (int i = 0; i < len; ++i) p[i] = z[i] + beta * p[i];
}

void scale_copy_scalar(double* y, double a, const double* x, int len) {
  for (int i = 0; i < len; ++i) y[i] = a * x[i];
}

void mul_ew_scalar(double* y, const double* a, const double* b, int len) {
  for (int i = 0; i < len; ++i) y[i] = a[i] * b[i];
}

double max_abs_scalar(const double* x, int len) {
  double m = 0.0;
  for (int i = 0; i < len; ++i) m = vmax(m, std::fabs(x[i]));
  return m;
}

void upwind_flux_scalar(double* q, double scale, const double* u, const double* fl,
                        const double* fr, int len) {
  for (int i = 0; i < len; ++i) {
    double donor = (u[i] >= 0.0) ? fl[i] : fr[i];
    q[i] = (scale * u[i]) * donor;
  }
}

void grad_scale_scalar(double* u, double c, const double* pl, const double* pr, int len) {
  for (int i = 0; i < len; ++i) u[i] = c * (pr[i] - pl[i]);
}

void flux_update_scalar(double* f, const double* f0, const double* qxl, const double* qxr,
                        const double* qyl, const double* qyr, int len) {
  for (int i = 0; i < len; ++i) {
    double v = f0[i] + ((qxl[i] - qxr[i]) + (qyl[i] - qyr[i]));
    f[i] = vmax(v, 0.0);
  }
}

}  // namespace

const Kernels& scalar_kernels() {
  static const Kernels k = {
      "scalar",
      dot_orbits_scalar,
      sum_orbits_scalar,
      wet_laplacian_row_scalar,
      axpy_scalar,
      xpay_scalar,
      scale_copy_scalar,
      mul_ew_scalar,
      max_abs_scalar,
      upwind_flux_scalar,
      grad_scale_scalar,
      flux_update_scalar,
  };
  return k;
}

}  // namespace sqflow::kernels
