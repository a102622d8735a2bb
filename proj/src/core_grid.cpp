#include "sqflow/core_grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sqflow/vof_advection.hpp"

namespace sqflow {

std::vector<uint32_t> ImprintImage::on_indices() const {
  std::vector<uint32_t> idx;
  const int n = wet.n();
  for (int r = 0; r < n; ++r) {
    const uint8_t* row = wet.row(r);
    for (int c = 0; c < n; ++c)
      if (row[c]) idx.push_back(static_cast<uint32_t>(r * n + c));
  }
  return idx;
}

ImprintImage ImprintImage::from_indices(const std::vector<uint32_t>& idx, int n) {
  ImprintImage img{BoolGrid(n)};
  for (uint32_t i : idx) {
    if (i >= static_cast<uint32_t>(n) * n)
      throw std::invalid_argument("imprint index out of range: " + std::to_string(i));
    img.wet.set(static_cast<int>(i) / n, static_cast<int>(i) % n, true);
  }
  return img;
}

double SimState::liquid_volume(const SimParams& p) const {
  // Kahan summation; the bookkeeping invariant is checked at 1e-6 relative.
  double s = 0.0, comp = 0.0;
  for (size_t i = 0; i < f_star.size(); ++i) {
    double y = f_star.data()[i] - comp;
    double t2 = s + y;
    comp = (t2 - s) - y;
    s = t2;
  }
  return s * p.cell_area() * p.h_ref;
}

double droplet_radius(const SimParams& params) {
  return std::sqrt(params.droplet_volume / (M_PI * params.initial_gap));
}

namespace {

/// Fraction of cell (r,c) covered by the disk centered at (yc,xc) with
/// radius rad, all in cell units, via 16x16 subcell sampling. Works purely
/// on coordinate differences so that rotated configurations evaluate the
/// same arithmetic.
double cell_coverage(int r, int c, double yc, double xc, double rad2) {
  int hits = 0;
  for (int a = 0; a < 16; ++a) {
    const double dy = (static_cast<double>(r) - yc) + (a + 0.5) / 16.0;
    const double dy2 = dy * dy;
    for (int b = 0; b < 16; ++b) {
      const double dx = (static_cast<double>(c) - xc) + (b + 0.5) / 16.0;
      hits += (dx * dx + dy2 <= rad2) ? 1 : 0;
    }
  }
  return hits / 256.0;
}

/// Order-invariant sum of a small value list: descending sort, then
/// left-to-right accumulation.
double sorted_sum(std::vector<double>& v) {
  std::sort(v.begin(), v.end(), [](double a, double b) { return a > b; });
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

SimState init_state(const DropPattern& dp, const SimParams& params) {
  params.validate();
  if (dp.count() == 0) throw std::invalid_argument("init_state: pattern has no On pixel");
  if (dp.n() != params.nozzle_n)
    throw std::invalid_argument("init_state: pattern size does not match nozzle_n");

  const int n = params.grid_n;
  const int cpp = params.cells_per_pitch;
  const double rad_cells = droplet_radius(params) / params.cell_size;
  if (2.0 * droplet_radius(params) > params.domain_side())
    throw std::invalid_argument("init_state: droplet radius exceeds half the domain");

  SimState st;
  st.t = 0.0;
  st.h = params.initial_gap;
  st.f_star = Field2D(n);
  st.outflow_volume = 0.0;

  // Per-droplet target volume fraction sum, V / (cell_area * h0). Fully
  // covered cells keep f = 1; the partial rim cells are scaled so each
  // droplet deposits its volume exactly.
  const double target_f = params.droplet_volume / (params.cell_area() * params.initial_gap);
  const double fstar_per_f = params.initial_gap / params.h_ref;
  const double rad2 = rad_cells * rad_cells;
  const int reach = static_cast<int>(std::ceil(rad_cells)) + 1;

  for (int i = 0; i < dp.n(); ++i) {
    for (int j = 0; j < dp.n(); ++j) {
      if (!dp.on(i, j)) continue;
      const double yc = cpp * i + 0.5 * cpp;
      const double xc = cpp * j + 0.5 * cpp;
      const int rmid = cpp * i + cpp / 2, cmid = cpp * j + cpp / 2;
      const int r0 = std::max(0, rmid - reach), r1 = std::min(n, rmid + reach);
      const int c0 = std::max(0, cmid - reach), c1 = std::min(n, cmid + reach);
      std::vector<double> partial_cov;
      std::vector<std::pair<int, double>> cells;
      int full = 0;
      for (int r = r0; r < r1; ++r) {
        for (int c = c0; c < c1; ++c) {
          const double f = cell_coverage(r, c, yc, xc, rad2);
          if (f > 0.0) {
            cells.emplace_back(r * n + c, f);
            if (f == 1.0) ++full;
            else partial_cov.push_back(f);
          }
        }
      }
      const double raw_partial = sorted_sum(partial_cov);
      const double rim_target = target_f - static_cast<double>(full);
      if (!(rim_target > 0.0) || cells.empty())
        throw std::invalid_argument("init_state: droplet rasterization failed");
      const double scale = raw_partial > 0.0 ? rim_target / raw_partial : 0.0;
      for (const auto& [idx, f] : cells)
        st.f_star.data()[idx] += (f == 1.0 ? 1.0 : f * scale) * fstar_per_f;
    }
  }

  // Overlapping droplets and scaled rim cells may exceed f = 1; push the
  // excess to neighbors (droplets at the domain edge may vent outward).
  st.outflow_volume += redistribute_overfill(st.f_star, st.h, params).outflow_volume;
  return st;
}

ImprintImage binarize_imprint(const Field2D& f_star, double h, const SimParams& params) {
  if (!(h > 0.0)) throw std::invalid_argument("binarize_imprint: h must be positive");
  const int n = f_star.n();
  const double scale = params.h_ref / h;
  ImprintImage img{BoolGrid(n)};
  for (int r = 0; r < n; ++r) {
    const double* src = f_star.row(r);
    uint8_t* dst = img.wet.row(r);
    for (int c = 0; c < n; ++c) dst[c] = (src[c] * scale >= params.wet_threshold) ? 1 : 0;
  }
  return img;
}

int wet_cell_count(const Field2D& f_star, double h, const SimParams& params) {
  const double scale = params.h_ref / h;
  int k = 0;
  for (size_t i = 0; i < f_star.size(); ++i)
    k += (f_star.data()[i] * scale >= params.wet_threshold) ? 1 : 0;
  return k;
}

}  // namespace sqflow
