#pragma once

#include "sqflow/field.hpp"
#include "sqflow/kernels.hpp"
#include "sqflow/params.hpp"

namespace sqflow {

/// Cell classification for the interface condition: wet cells carry the
/// elliptic equation, interface cells (0 < f < wet_threshold) and dry cells
/// carry the Dirichlet value p_hat = 0.
///
/// The liquid-gas boundary is located at sub-cell resolution: across a
/// wet/non-wet face the f = wet_threshold crossing sits at fraction theta
/// of the center-to-center distance (linear interpolation, clamped), and
/// the elliptic leg toward it carries coefficient 1/theta (symmetric ghost
/// treatment; plain faces carry 1). `diag_coef` is the per-cell sum of the
/// four face coefficients.
struct WetMask {
  BoolGrid wet;
  BoolGrid interface_cells;
  Field2D wet_d;      // 1.0 on wet cells, 0.0 elsewhere (kernel mask)
  Field2D diag_coef;  // per-cell stencil diagonal (4.0 in the interior)
  std::vector<double> face_coef_u;  // n x (n+1), x-face leg coefficients
  std::vector<double> face_coef_v;  // (n+1) x n, y-face leg coefficients
  int wet_count = 0;
  double liquid_area = 0.0;  // m^2, total liquid footprint sum(f)*cell_area
  GridBox wet_box;    // bounding box of wet cells

  const double* face_u_row(int r) const { return face_coef_u.data() + static_cast<size_t>(r) * (wet.n() + 1); }
  const double* face_v_row(int fr) const { return face_coef_v.data() + static_cast<size_t>(fr) * wet.n(); }
};

WetMask classify_cells(const Field2D& f_star, double h, const SimParams& params);

/// Solution of laplacian(phi) = 1 on wet cells, phi = 0 elsewhere; units m^2.
struct ShapeField {
  Field2D phi;
  int iterations = 0;
  double residual = 0.0;  // relative true residual at exit
};

/// Pressure scale field phi and the force-balance closure.
struct PressureSolution {
  Field2D p_hat;      // Pa, zero outside wet cells
  double gap_rate = 0.0;  // m/s, dh/dt
  double wet_area = 0.0;  // m^2, liquid footprint
};

/// Jacobi-preconditioned conjugate gradients on the five-point stencil with
/// Dirichlet zeros on non-wet cells and outside the grid. The iteration is
/// restricted to the wet bounding box (everything outside stays exactly
/// zero) and all reductions are 90-degree-rotation invariant, so the
/// returned field is exactly equivariant under rotation of the mask.
/// `warm` optionally seeds the iteration (values outside the wet set are
/// ignored). Throws on an empty wet set or non-convergence.
ShapeField solve_shape(const WetMask& mask, const SimParams& params,
                       const Field2D* warm = nullptr);

/// Gap reduction rate from the force balance on the superstrate:
/// (12 mu hdot / h^3) * sum(phi)*cell_area = cos_sum*sigma*A/h + F_ext,
/// where A is the liquid footprint sum(f)*cell_area (partial cells count by
/// their fill, so A = V_inside/h evolves smoothly and |hdot| stays
/// monotone; the wet-cell count would staircase). Negative for
/// capillary-driven closing. Throws when the wet area is empty or sum(phi)
/// is degenerate.
double gap_rate_from_balance(const ShapeField& phi, const WetMask& mask, double h,
                             const SimParams& params);

/// p_hat = (12 mu gap_rate / h^3) * phi, plus the closure scalars.
PressureSolution pressure_field(const ShapeField& phi, const WetMask& mask, double gap_rate,
                                double h, const SimParams& params);

}  // namespace sqflow
