#include "sqflow/pressure_solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sqflow {

using kernels::active_kernels;
using kernels::build_orbits_in_box;
using kernels::OrbitList;

WetMask classify_cells(const Field2D& f_star, double h, const SimParams& params) {
  if (!(h > 0.0)) throw std::invalid_argument("classify_cells: h must be positive");
  const int n = f_star.n();
  WetMask m;
  m.wet = BoolGrid(n);
  m.interface_cells = BoolGrid(n);
  m.wet_d = Field2D(n);
  m.diag_coef = Field2D(n);
  m.wet_box = GridBox{n, 0, n, 0};
  const double scale = params.h_ref / h;
  const double thr = params.wet_threshold;
  for (int r = 0; r < n; ++r) {
    const double* fs = f_star.row(r);
    uint8_t* wrow = m.wet.row(r);
    uint8_t* irow = m.interface_cells.row(r);
    double* drow = m.wet_d.row(r);
    for (int c = 0; c < n; ++c) {
      const double f = fs[c] * scale;
      const bool wet = f >= thr;
      wrow[c] = wet ? 1 : 0;
      irow[c] = (!wet && f > 0.0) ? 1 : 0;
      drow[c] = wet ? 1.0 : 0.0;
      if (wet) {
        ++m.wet_count;
        m.wet_box.r0 = std::min(m.wet_box.r0, r);
        m.wet_box.r1 = std::max(m.wet_box.r1, r + 1);
        m.wet_box.c0 = std::min(m.wet_box.c0, c);
        m.wet_box.c1 = std::max(m.wet_box.c1, c + 1);
      }
    }
  }
  if (m.wet_count == 0) m.wet_box = GridBox{};
  // Liquid footprint: partial cells count by their fill. Orbit reduction
  // keeps the value rotation-invariant.
  m.liquid_area = active_kernels().sum_orbits(f_star.data(), build_orbits_in_box(n, GridBox{0, n, 0, n})) *
                  scale * params.cell_area();

  // Face leg coefficients: across a wet/non-wet face the boundary
  // (f = wet_threshold) sits at fraction theta of the center-to-center
  // distance from the wet cell and the leg carries 1/theta. Cells outside
  // the grid count as dry (f = 0).
  constexpr double theta_min = 0.05;
  auto f_at = [&](int r, int c) {
    return (r >= 0 && r < n && c >= 0 && c < n) ? f_star(r, c) * scale : 0.0;
  };
  auto face_coef = [&](double fa, double fb) {
    const bool wa = fa >= thr, wb = fb >= thr;
    if (wa == wb) return 1.0;
    const double fw = wa ? fa : fb;
    const double fd = wa ? fb : fa;
    const double theta = std::max((fw - thr) / (fw - fd), theta_min);
    return 1.0 / theta;
  };
  m.face_coef_u.assign(static_cast<size_t>(n) * (n + 1), 1.0);
  m.face_coef_v.assign(static_cast<size_t>(n + 1) * n, 1.0);
  for (int r = 0; r < n; ++r) {
    double* row = m.face_coef_u.data() + static_cast<size_t>(r) * (n + 1);
    for (int j = 0; j <= n; ++j) row[j] = face_coef(f_at(r, j - 1), f_at(r, j));
  }
  for (int fr = 0; fr <= n; ++fr) {
    double* row = m.face_coef_v.data() + static_cast<size_t>(fr) * n;
    for (int c = 0; c < n; ++c) row[c] = face_coef(f_at(fr - 1, c), f_at(fr, c));
  }
  // Diagonal = sum of the four face coefficients (4.0 in the interior).
  for (int r = 0; r < n; ++r) {
    const double* fu = m.face_u_row(r);
    const double* fvn = m.face_v_row(r);
    const double* fvs = m.face_v_row(r + 1);
    double* drow = m.diag_coef.row(r);
    for (int c = 0; c < n; ++c)
      drow[c] = (fvn[c] + fvs[c]) + (fu[c] + fu[c + 1]);
  }
  return m;
}

namespace {

/// y = A x restricted to the box; A is the boundary-corrected negated
/// five-point Laplacian on wet cells (SPD) and the identity on the rest.
/// Cells outside the box are never touched and must already be zero in
/// both x and y.
void apply_operator(Field2D& y, const Field2D& x, const WetMask& mask, const GridBox& box,
                    double inv_dx2, const std::vector<double>& zero_row,
                    const kernels::Kernels& k) {
  const int n = x.n();
  for (int r = box.r0; r < box.r1; ++r) {
    const double* xc = x.row(r);
    const double* xn = (r > 0) ? x.row(r - 1) : zero_row.data();
    const double* xs = (r + 1 < n) ? x.row(r + 1) : zero_row.data();
    const double* md = mask.wet_d.row(r);
    const double* dd = mask.diag_coef.row(r);
    double* yr = y.row(r);
    const int cl = std::max(box.c0, 1);
    const int cr = std::min(box.c1, n - 1);
    if (cr > cl)
      k.wet_laplacian_row(yr + cl, xc + cl, xn + cl, xs + cl, md + cl, dd + cl, inv_dx2,
                          cr - cl);
    // Grid-edge columns: the out-of-grid neighbor value is zero.
    if (box.c0 == 0) {
      const int c = 0;
      const double east = (n > 1) ? xc[c + 1] : 0.0;
      double lap = (dd[c] * xc[c] - ((xn[c] + xs[c]) + (0.0 + east))) * inv_dx2;
      yr[c] = md[c] * lap + (1.0 - md[c]) * xc[c];
    }
    if (box.c1 == n && n > 1) {
      const int c = n - 1;
      double lap = (dd[c] * xc[c] - ((xn[c] + xs[c]) + (xc[c - 1] + 0.0))) * inv_dx2;
      yr[c] = md[c] * lap + (1.0 - md[c]) * xc[c];
    }
  }
}

struct BoxOps {
  const GridBox& box;
  int n;
  const kernels::Kernels& k;

  void axpy(Field2D& y, double a, const Field2D& x) const {
    for (int r = box.r0; r < box.r1; ++r)
      k.axpy(y.row(r) + box.c0, a, x.row(r) + box.c0, box.cols());
  }
  void xpay(Field2D& p, const Field2D& z, double beta) const {
    for (int r = box.r0; r < box.r1; ++r)
      k.xpay(p.row(r) + box.c0, z.row(r) + box.c0, beta, box.cols());
  }
  void mul_ew(Field2D& y, const Field2D& a, const Field2D& b) const {
    for (int r = box.r0; r < box.r1; ++r)
      k.mul_ew(y.row(r) + box.c0, a.row(r) + box.c0, b.row(r) + box.c0, box.cols());
  }
  void copy(Field2D& dst, const Field2D& src) const {
    for (int r = box.r0; r < box.r1; ++r)
      std::copy(src.row(r) + box.c0, src.row(r) + box.c1, dst.row(r) + box.c0);
  }
};

}  // namespace

ShapeField solve_shape(const WetMask& mask, const SimParams& params, const Field2D* warm) {
  if (mask.wet_count == 0) throw std::runtime_error("solve_shape: empty wet set");
  const int n = mask.wet.n();
  const GridBox box = mask.wet_box;
  const double dx = params.cell_size;
  const double inv_dx2 = 1.0 / (dx * dx);
  const kernels::Kernels& k = active_kernels();
  const OrbitList orbits = build_orbits_in_box(n, box);
  const std::vector<double> zero_row(static_cast<size_t>(n), 0.0);
  const BoxOps ops{box, n, k};

  Field2D x(n), r(n), z(n), p(n), q(n), b(n), invdiag(n);

  // b = -1 on wet cells; Jacobi preconditioner is the inverse diagonal.
  for (int rr = box.r0; rr < box.r1; ++rr) {
    const double* md = mask.wet_d.row(rr);
    const double* dd = mask.diag_coef.row(rr);
    double* brow = b.row(rr);
    double* drow = invdiag.row(rr);
    for (int c = box.c0; c < box.c1; ++c) {
      brow[c] = -md[c];
      drow[c] = (md[c] > 0.0) ? 1.0 / (dd[c] * inv_dx2) : 1.0;
    }
  }
  const double normb = std::sqrt(k.dot_orbits(b.data(), b.data(), orbits));
  const double stop = params.solver_tol * normb;

  if (warm != nullptr) {
    ops.mul_ew(x, *warm, mask.wet_d);
    apply_operator(q, x, mask, box, inv_dx2, zero_row, k);
    ops.copy(r, b);
    ops.axpy(r, -1.0, q);
  } else {
    ops.copy(r, b);
  }

  ShapeField out;
  const int max_iter = params.effective_max_iter();
  double res = std::sqrt(k.dot_orbits(r.data(), r.data(), orbits));
  if (res <= stop) {
    out.phi = std::move(x);
    out.iterations = 0;
    out.residual = res / normb;
    return out;
  }

  ops.mul_ew(z, r, invdiag);
  ops.copy(p, z);
  double rho = k.dot_orbits(r.data(), z.data(), orbits);

  for (int it = 1; it <= max_iter; ++it) {
    apply_operator(q, p, mask, box, inv_dx2, zero_row, k);
    const double pq = k.dot_orbits(p.data(), q.data(), orbits);
    if (!(pq > 0.0)) throw std::runtime_error("solve_shape: CG breakdown (p'Ap <= 0)");
    const double alpha = rho / pq;
    ops.axpy(x, alpha, p);
    ops.axpy(r, -alpha, q);
    res = std::sqrt(k.dot_orbits(r.data(), r.data(), orbits));
    if (res <= stop) {
      // Verify against the true residual; the recurrence can drift.
      apply_operator(q, x, mask, box, inv_dx2, zero_row, k);
      ops.copy(z, b);
      ops.axpy(z, -1.0, q);
      const double res_true = std::sqrt(k.dot_orbits(z.data(), z.data(), orbits));
      if (res_true <= stop) {
        out.phi = std::move(x);
        out.iterations = it;
        out.residual = res_true / normb;
        return out;
      }
      ops.copy(r, z);
      ops.mul_ew(z, r, invdiag);
      ops.copy(p, z);
      rho = k.dot_orbits(r.data(), z.data(), orbits);
      continue;
    }
    ops.mul_ew(z, r, invdiag);
    const double rho_next = k.dot_orbits(r.data(), z.data(), orbits);
    const double beta = rho_next / rho;
    rho = rho_next;
    ops.xpay(p, z, beta);
  }
  throw std::runtime_error("solve_shape: no convergence within " + std::to_string(max_iter) +
                           " iterations");
}

double gap_rate_from_balance(const ShapeField& phi, const WetMask& mask, double h,
                             const SimParams& params) {
  if (mask.wet_count == 0)
    throw std::runtime_error("gap_rate_from_balance: empty wet area");
  const kernels::Kernels& k = active_kernels();
  const OrbitList orbits = build_orbits_in_box(phi.phi.n(), mask.wet_box);
  const double phi_integral = k.sum_orbits(phi.phi.data(), orbits) * params.cell_area();
  if (phi_integral == 0.0)
    throw std::runtime_error("gap_rate_from_balance: degenerate phi integral");
  const double capillary =
      params.contact_angle_cos_sum * params.surface_tension * mask.liquid_area / h;
  const double h3 = h * h * h;
  return h3 * (capillary + params.external_force) / (12.0 * params.viscosity * phi_integral);
}

PressureSolution pressure_field(const ShapeField& phi, const WetMask& mask, double gap_rate,
                                double h, const SimParams& params) {
  const kernels::Kernels& k = active_kernels();
  const int n = phi.phi.n();
  PressureSolution out;
  out.p_hat = Field2D(n);
  const double coef = 12.0 * params.viscosity * gap_rate / (h * h * h);
  k.scale_copy(out.p_hat.data(), coef, phi.phi.data(), n * n);
  out.gap_rate = gap_rate;
  out.wet_area = mask.liquid_area;
  return out;
}

}  // namespace sqflow
