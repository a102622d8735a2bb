#include "sqflow/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace sqflow::kernels {

OrbitList build_orbits(int n) {
  return build_orbits_in_box(n, GridBox{0, n, 0, n});
}

OrbitList build_orbits_in_box(int n, const GridBox& box) {
  OrbitList o;
  const int half = n / 2;
  // Representatives: top-left quadrant, widened by one column for odd n so
  // the middle row/column orbits are covered exactly once.
  const int rep_cols = half + (n % 2);
  o.i0.reserve(static_cast<size_t>(half) * rep_cols);
  o.i1.reserve(o.i0.capacity());
  o.i2.reserve(o.i0.capacity());
  o.i3.reserve(o.i0.capacity());
  auto inside = [&box](int r, int c) {
    return r >= box.r0 && r < box.r1 && c >= box.c0 && c < box.c1;
  };
  for (int r = 0; r < half; ++r) {
    for (int c = 0; c < rep_cols; ++c) {
      const int r1 = c, c1 = n - 1 - r;
      const int r2 = n - 1 - r, c2 = n - 1 - c;
      const int r3 = n - 1 - c, c3 = r;
      if (inside(r, c) || inside(r1, c1) || inside(r2, c2) || inside(r3, c3)) {
        o.i0.push_back(r * n + c);
        o.i1.push_back(r1 * n + c1);
        o.i2.push_back(r2 * n + c2);
        o.i3.push_back(r3 * n + c3);
      }
    }
  }
  if (n % 2 == 1) {
    const int mid = n / 2;
    if (inside(mid, mid)) o.center = mid * n + mid;
  }
  return o;
}

const Kernels& active_kernels() {
  static const Kernels* selected = [] {
    const char* env = std::getenv("SQFLOW_SIMD");
    if (env != nullptr && std::strcmp(env, "scalar") == 0) return &scalar_kernels();
    if (const Kernels* v = avx2_kernels()) return v;
    return &scalar_kernels();
  }();
  return *selected;
}

}  // namespace sqflow::kernels
