#include "sqflow/kernels.hpp"

// AVX2 variants of the scalar reference kernels. Compiled with function
// target attributes so the TU itself builds on the baseline ISA; callers
// must only reach these through avx2_kernels(), which checks CPU support
// at runtime. Multiplies and adds are kept separate (no FMA) so results
// are bitwise equal to the scalar path.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>

namespace sqflow::kernels {
namespace {

inline double vmax(double a, double b) { return (a > b) ? a : b; }
inline double vmin(double a, double b) { return (a < b) ? a : b; }

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

__attribute__((target("avx2"))) inline __m256d gather4(const double* base, const int32_t* idx) {
  __m128i vi = _mm_loadu_si128(reinterpret_cast<const __m128i*>(idx));
  return _mm256_i32gather_pd(base, vi, 8);
}

__attribute__((target("avx2")))
double dot_orbits_avx2(const double* x, const double* y, const OrbitList& o) {
  const size_t m = o.count();
  const size_t quads = m & ~size_t{3};
  __m256d accv = _mm256_setzero_pd();
  for (size_t k = 0; k < quads; k += 4) {
    __m256d v0 = _mm256_mul_pd(gather4(x, &o.i0[k]), gather4(y, &o.i0[k]));
    __m256d v1 = _mm256_mul_pd(gather4(x, &o.i1[k]), gather4(y, &o.i1[k]));
    __m256d v2 = _mm256_mul_pd(gather4(x, &o.i2[k]), gather4(y, &o.i2[k]));
    __m256d v3 = _mm256_mul_pd(gather4(x, &o.i3[k]), gather4(y, &o.i3[k]));
    // Lane-wise descending sort network, same sequence as the scalar path.
    __m256d h1 = _mm256_max_pd(v0, v1), l1 = _mm256_min_pd(v0, v1);
    __m256d h2 = _mm256_max_pd(v2, v3), l2 = _mm256_min_pd(v2, v3);
    __m256d s0 = _mm256_max_pd(h1, h2), sx = _mm256_min_pd(h1, h2);
    __m256d sy = _mm256_max_pd(l1, l2), s3 = _mm256_min_pd(l1, l2);
    __m256d s1 = _mm256_max_pd(sx, sy);
    __m256d s2 = _mm256_min_pd(sx, sy);
    __m256d s = _mm256_add_pd(_mm256_add_pd(_mm256_add_pd(s0, s1), s2), s3);
    accv = _mm256_add_pd(accv, s);
  }
  alignas(32) double acc[4];
  _mm256_store_pd(acc, accv);
  for (size_t k = quads; k < m; ++k) {
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

__attribute__((target("avx2")))
double sum_orbits_avx2(const double* x, const OrbitList& o) {
  const size_t m = o.count();
  const size_t quads = m & ~size_t{3};
  __m256d accv = _mm256_setzero_pd();
  for (size_t k = 0; k < quads; k += 4) {
    __m256d v0 = gather4(x, &o.i0[k]);
    __m256d v1 = gather4(x, &o.i1[k]);
    __m256d v2 = gather4(x, &o.i2[k]);
    __m256d v3 = gather4(x, &o.i3[k]);
    __m256d h1 = _mm256_max_pd(v0, v1), l1 = _mm256_min_pd(v0, v1);
    __m256d h2 = _mm256_max_pd(v2, v3), l2 = _mm256_min_pd(v2, v3);
    __m256d s0 = _mm256_max_pd(h1, h2), sx = _mm256_min_pd(h1, h2);
    __m256d sy = _mm256_max_pd(l1, l2), s3 = _mm256_min_pd(l1, l2);
    __m256d s1 = _mm256_max_pd(sx, sy);
    __m256d s2 = _mm256_min_pd(sx, sy);
    __m256d s = _mm256_add_pd(_mm256_add_pd(_mm256_add_pd(s0, s1), s2), s3);
    accv = _mm256_add_pd(accv, s);
  }
  alignas(32) double acc[4];
  _mm256_store_pd(acc, accv);
  for (size_t k = quads; k < m; ++k) {
    double v0 = x[o.i0[k]], v1 = x[o.i1[k]], v2 = x[o.i2[k]], v3 = x[o.i3[k]];
    sort4_desc(v0, v1, v2, v3);
    acc[k & 3] += ((v0 + v1) + v2) + v3;
  }
  if (o.center >= 0) acc[m & 3] += x[o.center];
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

__attribute__((target("avx2")))
void wet_laplacian_row_avx2(double* y, const double* x, const double* xn, const double* xs,
                            const double* m, const double* d, double inv_dx2, int len) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d inv = _mm256_set1_pd(inv_dx2);
  int i = 0;
  for (; i + 4 <= len; i += 4) {
    __m256d xc = _mm256_loadu_pd(x + i);
    __m256d dv = _mm256_loadu_pd(d + i);
    __m256d ns = _mm256_add_pd(_mm256_loadu_pd(xn + i), _mm256_loadu_pd(xs + i));
    __m256d we = _mm256_add_pd(_mm256_loadu_pd(x + i - 1), _mm256_loadu_pd(x + i + 1));
    __m256d lap = _mm256_mul_pd(_mm256_sub_pd(_mm256_mul_pd(dv, xc), _mm256_add_pd(ns, we)), inv);
    __m256d mv = _mm256_loadu_pd(m + i);
    __m256d out = _mm256_add_pd(_mm256_mul_pd(mv, lap),
                                _mm256_mul_pd(_mm256_sub_pd(one, mv), xc));
    _mm256_storeu_pd(y + i, out);
  }
  for (; i < len; ++i) {
    double lap = (d[i] * x[i] - ((xn[i] + xs[i]) + (x[i - 1] + x[i + 1]))) * inv_dx2;
    y[i] = m[i] * lap + (1.0 - m[i]) * x[i];
  }
}

__attribute__((target("avx2")))
void axpy_avx2(double* y, double a, const double* x, int len) {
  const __m256d av = _mm256_set1_pd(a);
  int i = 0;
  for (; i + 4 <= len; i += 4) {
    __m256d v = _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_mul_pd(av, _mm256_loadu_pd(x + i)));
    _mm256_storeu_pd(y + i, v);
  }
  for (; i < len; ++i) y[i] = y[i] + a * x[i];
}

__attribute__((target("avx2")))
void xpay_avx2(double* p, const double* z, double beta, int len) {
  const __m256d bv = _mm256_set1_pd(beta);
  int i = 0;
  for (; i + 4 <= len; i += 4) {
    __m256d v = _mm256_add_pd(_mm256_loadu_pd(z + i), _mm256_mul_pd(bv, _mm256_loadu_pd(p + i)));
    _mm256_storeu_pd(p + i, v);
  }
  for (; i < len; ++i) p[i] = z[i] + beta * p[i];
}

__attribute__((target("avx2")))
void scale_copy_avx2(double* y, double a, const double* x, int len) {
  const __m256d av = _mm256_set1_pd(a);
  int i = 0;
  for (; i + 4 <= len; i += 4)
    _mm256_storeu_pd(y + i, _mm256_mul_pd(av, _mm256_loadu_pd(x + i)));
  for (; i < len; ++i) y[i] = a * x[i];
}

__attribute__((target("avx2")))
void mul_ew_avx2(double* y, const double* a, const double* b, int len) {
  int i = 0;
  for (; i + 4 <= len; i += 4)
    _mm256_storeu_pd(y + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < len; ++i) y[i] = a[i] * b[i];
}

__attribute__((target("avx2")))
double max_abs_avx2(const double* x, int len) {
  const __m256d absmask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7FFFFFFFFFFFFFFFLL));
  __m256d mv = _mm256_setzero_pd();
  int i = 0;
  for (; i + 4 <= len; i += 4)
    mv = _mm256_max_pd(mv, _mm256_and_pd(absmask, _mm256_loadu_pd(x + i)));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, mv);
  double m = vmax(vmax(lanes[0], lanes[1]), vmax(lanes[2], lanes[3]));
  for (; i < len; ++i) m = vmax(m, std::fabs(x[i]));
  return m;
}

__attribute__((target("avx2")))
void upwind_flux_avx2(double* q, double scale, const double* u, const double* fl,
                      const double* fr, int len) {
  const __m256d sv = _mm256_set1_pd(scale);
  const __m256d zero = _mm256_setzero_pd();
  int i = 0;
  for (; i + 4 <= len; i += 4) {
    __m256d uv = _mm256_loadu_pd(u + i);
    __m256d ge = _mm256_cmp_pd(uv, zero, _CMP_GE_OQ);
    __m256d donor = _mm256_blendv_pd(_mm256_loadu_pd(fr + i), _mm256_loadu_pd(fl + i), ge);
    _mm256_storeu_pd(q + i, _mm256_mul_pd(_mm256_mul_pd(sv, uv), donor));
  }
  for (; i < len; ++i) {
    double donor = (u[i] >= 0.0) ? fl[i] : fr[i];
    q[i] = (scale * u[i]) * donor;
  }
}

__attribute__((target("avx2")))
void grad_scale_avx2(double* u, double c, const double* pl, const double* pr, int len) {
  const __m256d cv = _mm256_set1_pd(c);
  int i = 0;
  for (; i + 4 <= len; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(pr + i), _mm256_loadu_pd(pl + i));
    _mm256_storeu_pd(u + i, _mm256_mul_pd(cv, d));
  }
  for (; i < len; ++i) u[i] = c * (pr[i] - pl[i]);
}

__attribute__((target("avx2")))
void flux_update_avx2(double* f, const double* f0, const double* qxl, const double* qxr,
                      const double* qyl, const double* qyr, int len) {
  const __m256d zero = _mm256_setzero_pd();
  int i = 0;
  for (; i + 4 <= len; i += 4) {
    __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(qxl + i), _mm256_loadu_pd(qxr + i));
    __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(qyl + i), _mm256_loadu_pd(qyr + i));
    __m256d v = _mm256_add_pd(_mm256_loadu_pd(f0 + i), _mm256_add_pd(dx, dy));
    _mm256_storeu_pd(f + i, _mm256_max_pd(v, zero));
  }
  for (; i < len; ++i) {
    double v = f0[i] + ((qxl[i] - qxr[i]) + (qyl[i] - qyr[i]));
    f[i] = vmax(v, 0.0);
  }
}

}  // namespace

const Kernels* avx2_kernels() {
  if (!__builtin_cpu_supports("avx2")) return nullptr;
  static const Kernels k = {
      "avx2",
      dot_orbits_avx2,
      sum_orbits_avx2,
      wet_laplacian_row_avx2,
      axpy_avx2,
      xpay_avx2,
      scale_copy_avx2,
      mul_ew_avx2,
      max_abs_avx2,
      upwind_flux_avx2,
      grad_scale_avx2,
      flux_update_avx2,
  };
  return &k;
}

}  // namespace sqflow::kernels

#else  // non-x86 builds fall back to the scalar reference path

namespace sqflow::kernels {
const Kernels* avx2_kernels() { return nullptr; }
}  // namespace sqflow::kernels

#endif
