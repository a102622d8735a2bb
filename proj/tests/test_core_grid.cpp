#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "sqflow/core_grid.hpp"
#include "sqflow/pattern.hpp"

using namespace sqflow;

namespace {

SimParams default_params() {
  SimParams p;
  p.derive_grid();
  p.validate();
  return p;
}

}  // namespace

TEST_SUITE("core-grid") {

TEST_CASE("default parameters match the published setup") {
  const SimParams p = default_params();
  CHECK(p.viscosity == 0.001);
  CHECK(p.surface_tension == 0.032);
  CHECK(p.droplet_volume == 6e-15);
  CHECK(p.initial_gap == 1e-6);
  CHECK(p.nozzle_pitch == doctest::Approx(84.5e-6));
  CHECK(p.cell_size == doctest::Approx(10.5625e-6));
  CHECK(p.grid_n == 160);
  CHECK(p.grid_n == p.nozzle_n * p.cells_per_pitch);
  CHECK(p.term_coverage_max == 0.90);
  CHECK(p.term_time_max == 1.0);
  CHECK(p.term_h_min == 5e-9);
}

TEST_CASE("parameter file overrides and rejections") {
  namespace fs = std::filesystem;
  const fs::path file = fs::temp_directory_path() / "sqflow_params_test.txt";
  {
    std::ofstream out(file);
    out << "# test params\n"
        << "viscosity = 0.002\n"
        << "cells_per_pitch = 16\n"
        << "term_h_min = 1e-8\n";
  }
  const SimParams p = load_params_file(file);
  CHECK(p.viscosity == 0.002);
  CHECK(p.cells_per_pitch == 16);
  CHECK(p.grid_n == 320);  // derived
  CHECK(p.cell_size == doctest::Approx(84.5e-6 / 16));
  CHECK(p.term_h_min == 1e-8);
  fs::remove(file);

  SimParams base;
  CHECK_THROWS_AS(apply_param(base, "grid_n", "100"), std::invalid_argument);
  CHECK_THROWS_AS(apply_param(base, "no_such_key", "1"), std::invalid_argument);
  CHECK_THROWS_AS(apply_param(base, "viscosity", "abc"), std::invalid_argument);
  CHECK_THROWS_AS(apply_param(base, "nozzle_n", "2.5"), std::invalid_argument);
}

TEST_CASE("parameter validation rejects broken settings") {
  SimParams p = default_params();
  p.viscosity = -1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = default_params();
  p.contact_angle_cos_sum = 2.5;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = default_params();
  p.grid_n = 159;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = default_params();
  p.wet_threshold = 1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("random pattern: count, range, determinism") {
  const DropPattern a = make_pattern_random(1, 42);
  CHECK(a.count() == 1);
  const DropPattern b = make_pattern_random(40, 42);
  CHECK(b.count() == 40);  // distinct by construction
  const DropPattern c = make_pattern_random(40, 42);
  CHECK(b == c);
  const DropPattern d = make_pattern_random(40, 43);
  CHECK(b.on_indices() != d.on_indices());
  CHECK(make_pattern_random(400, 9).count() == 400);
  CHECK_THROWS_AS(make_pattern_random(0, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_pattern_random(401, 1), std::invalid_argument);
}

TEST_CASE("pattern text round-trip and validation") {
  const DropPattern dp = make_pattern_random(7, 123);
  const DropPattern back = parse_pattern_text(pattern_to_text(dp));
  CHECK(dp == back);
  CHECK_THROWS(parse_pattern_text("01"));
  CHECK_THROWS(parse_pattern_text(std::string(20, '2') + "\n"));
}

TEST_CASE("initial droplet radius is 43.70 um, about 4.14 cells") {
  const SimParams p = default_params();
  CHECK(droplet_radius(p) == doctest::Approx(43.70e-6).epsilon(1e-3));
  CHECK(droplet_radius(p) / p.cell_size == doctest::Approx(4.137).epsilon(1e-3));
}

TEST_CASE("init_state conserves the deposited volume exactly") {
  const SimParams p = default_params();
  for (int k : {1, 5, 40}) {
    const DropPattern dp = make_pattern_random(k, 77 + k);
    const SimState st = init_state(dp, p);
    CHECK(st.t == 0.0);
    CHECK(st.h == p.initial_gap);
    // droplets at the very edge may vent a sliver outward at the clamp
    CHECK(st.liquid_volume(p) + st.outflow_volume ==
          doctest::Approx(k * p.droplet_volume).epsilon(1e-9));
    // f stays within the tolerance band after the init clamp
    const double scale = p.h_ref / st.h;
    double maxf = 0.0, minf = 0.0;
    for (size_t i = 0; i < st.f_star.size(); ++i) {
      maxf = std::max(maxf, st.f_star.data()[i] * scale);
      minf = std::min(minf, st.f_star.data()[i] * scale);
    }
    CHECK(maxf <= 1.0 + 1e-9);
    CHECK(minf >= 0.0);
  }
}

TEST_CASE("init_state rejects empty patterns and oversized droplets") {
  const SimParams p = default_params();
  CHECK_THROWS_AS(init_state(DropPattern(p.nozzle_n), p), std::invalid_argument);
  SimParams big = p;
  big.droplet_volume = 1e-8;  // radius beyond half the domain
  CHECK_THROWS_AS(init_state(make_pattern_random(1, 1), big), std::invalid_argument);
}

TEST_CASE("init_state of a rotated pattern is the exact rotation") {
  const SimParams p = default_params();
  const DropPattern dp = make_pattern_random(6, 2024);
  const SimState a = init_state(dp, p);
  const SimState b = init_state(rotate_cw(dp), p);
  CHECK(rotate_cw(a.f_star) == b.f_star);
}

TEST_CASE("binarize_imprint basics") {
  const SimParams p = default_params();
  Field2D zero(p.grid_n);
  CHECK(binarize_imprint(zero, p.initial_gap, p).wet.count() == 0);

  Field2D full(p.grid_n, 1.0);
  CHECK(binarize_imprint(full, p.initial_gap, p).wet.count() == p.grid_n * p.grid_n);

  // single-droplet initial footprint is about V/h0 / cell_area = 53.8 cells
  DropPattern dp(p.nozzle_n);
  dp.set(10, 10, true);
  const SimState st = init_state(dp, p);
  const int wet = binarize_imprint(st.f_star, st.h, p).wet.count();
  CHECK(wet >= 50);
  CHECK(wet <= 58);
}

TEST_CASE("binarize_imprint is monotone in the threshold") {
  const SimParams p = default_params();
  DropPattern dp = make_pattern_random(3, 5);
  const SimState st = init_state(dp, p);
  SimParams lo = p, hi = p;
  lo.wet_threshold = 0.3;
  hi.wet_threshold = 0.7;
  const ImprintImage a = binarize_imprint(st.f_star, st.h, lo);
  const ImprintImage b = binarize_imprint(st.f_star, st.h, hi);
  CHECK(b.wet.count() <= a.wet.count());
  for (int r = 0; r < p.grid_n; ++r)
    for (int c = 0; c < p.grid_n; ++c)
      if (b.wet.get(r, c)) CHECK(a.wet.get(r, c));
}

TEST_CASE("imprint index round trip") {
  const SimParams p = default_params();
  DropPattern dp = make_pattern_random(4, 9);
  const SimState st = init_state(dp, p);
  const ImprintImage img = binarize_imprint(st.f_star, st.h, p);
  CHECK(ImprintImage::from_indices(img.on_indices()) == img);
}

}  // TEST_SUITE
