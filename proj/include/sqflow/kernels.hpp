#pragma once

#include <cstdint>
#include <vector>

#include "sqflow/field.hpp"

namespace sqflow::kernels {

/// Cells grouped into 90-degree rotation orbits of an n x n grid.
///
/// Each orbit holds the four linear indices {(r,c), (c,n-1-r),
/// (n-1-r,n-1-c), (n-1-c,r)}, one per quadrant; representatives are the
/// top-left quadrant cells in row-major order, so the orbit labelling is
/// invariant under rotation of the field contents. For odd n, the center
/// cell forms a one-element orbit stored separately.
struct OrbitList {
  std::vector<int32_t> i0, i1, i2, i3;  // SoA member indices
  int32_t center = -1;                  // -1 when n is even
  size_t count() const { return i0.size(); }
};

/// All orbits of an n x n grid.
OrbitList build_orbits(int n);

/// Orbits with at least one member inside `box`. Values outside the box
/// are required to be exact zeros by the callers, which keeps reductions
/// over this subset bitwise equal to reductions over the full grid.
OrbitList build_orbits_in_box(int n, const GridBox& box);

/// Data-parallel inner loops. The scalar entries are the reference
/// semantics; the AVX2 entries must reproduce them bitwise (no FMA
/// contraction, identical min/max and blend semantics). Reductions use a
/// fixed four-accumulator pattern over sorted orbit values, which makes
/// them invariant under 90-degree rotation of their inputs.
struct Kernels {
  const char* name;

  // Reductions over rotation orbits (order-invariant, see above).
  double (*dot_orbits)(const double* x, const double* y, const OrbitList& o);
  double (*sum_orbits)(const double* x, const OrbitList& o);

  // y[i] = m[i]*((d[i]*x[i] - ((n[i]+s[i]) + (w[i]+e[i]))) * inv_dx2) + (1-m[i])*x[i]
  // where w/e are x[i-1]/x[i+1]; caller guarantees those loads are in range.
  // d is the per-cell diagonal of the boundary-corrected stencil.
  void (*wet_laplacian_row)(double* y, const double* x, const double* xn, const double* xs,
                            const double* m, const double* d, double inv_dx2, int len);

  void (*axpy)(double* y, double a, const double* x, int len);            // y += a*x
  void (*xpay)(double* p, const double* z, double beta, int len);         // p = z + beta*p
  void (*scale_copy)(double* y, double a, const double* x, int len);      // y = a*x
  void (*mul_ew)(double* y, const double* a, const double* b, int len);   // y = a*b
  double (*max_abs)(const double* x, int len);

  // q[i] = ((scale*u[i]) * (u[i] >= 0 ? fl[i] : fr[i]))
  void (*upwind_flux)(double* q, double scale, const double* u, const double* fl,
                      const double* fr, int len);
  // u[i] = c*(pr[i] - pl[i])
  void (*grad_scale)(double* u, double c, const double* pl, const double* pr, int len);
  // f[i] = max(f0[i] + ((qxl[i]-qxr[i]) + (qyl[i]-qyr[i])), 0)
  void (*flux_update)(double* f, const double* f0, const double* qxl, const double* qxr,
                      const double* qyl, const double* qyr, int len);
};

/// Scalar reference kernels; always available.
const Kernels& scalar_kernels();

/// AVX2 kernels, or nullptr when the CPU lacks AVX2.
const Kernels* avx2_kernels();

/// Kernels selected at startup: AVX2 when supported unless the
/// environment variable SQFLOW_SIMD is set to "scalar".
const Kernels& active_kernels();

}  // namespace sqflow::kernels
