#include <doctest.h>

#include <cmath>
#include <memory>

#include "heatcover/field.hpp"
#include "heatcover/geometry.hpp"
#include "oracles.hpp"

using namespace heatcover;

namespace {

struct Fixture {
  RegionGrid grid;
  std::shared_ptr<const CellSet> cells;

  explicit Fixture(double w, double h, double spacing, std::vector<Rect> holes = {}) {
    RegionSpec spec;
    spec.outer = {0, 0, w, h};
    spec.holes = std::move(holes);
    spec.spacing = spacing;
    grid = build_region(spec);
    cells = std::make_shared<CellSet>(CellSet::of(grid, grid.masked_cells()));
  }

  ScalarField field(double value = 0.0) const {
    ScalarField f = ScalarField::zeros(grid, cells);
    for (int32_t c : cells->cells) f.values[static_cast<size_t>(c)] = value;
    return f;
  }

  ScalarField gaussian(Vec2 center, double width, double amp = 1.0) const {
    ScalarField f = ScalarField::zeros(grid, cells);
    for (int32_t c : cells->cells) {
      const Vec2 d = grid.center(c) - center;
      f.values[static_cast<size_t>(c)] = amp * std::exp(-dot(d, d) / width);
    }
    return f;
  }

  double integral(const ScalarField& f) const {
    double s = 0.0;
    for (int32_t c : cells->cells) s += f.values[static_cast<size_t>(c)];
    return s * grid.cell_area();
  }
};

}  // namespace

TEST_CASE("solve_heat_field: zero source gives the zero field") {
  const Fixture fx(5, 5, 0.1);
  const FieldParams params;
  const ScalarField T = solve_heat_field(fx.field(0.0), params);
  CHECK(T.max_abs() <= 1e-10);
}

TEST_CASE("solve_heat_field: constant source gives T = c/beta") {
  const Fixture fx(3, 2, 0.1, {{1, 0.5, 2, 1.5}});
  FieldParams params;
  params.beta = 2.5;
  const ScalarField T = solve_heat_field(fx.field(5.0), params);
  for (int32_t c : fx.cells->cells)
    CHECK(T.values[static_cast<size_t>(c)] == doctest::Approx(5.0 / 2.5).epsilon(1e-8));
}

TEST_CASE("solve_heat_field: point source on a square") {
  const Fixture fx(5, 5, 0.1);  // 50x50
  ScalarField h = fx.field(0.0);
  h.values[static_cast<size_t>(fx.grid.idx(25, 25))] = 100.0;
  FieldParams params;
  const ScalarField T = solve_heat_field(h, params);

  // discrete conservation: beta * sum(T) == sum(h)
  CHECK(params.beta * fx.integral(T) == doctest::Approx(fx.integral(h)).epsilon(1e-6));
  // strict positivity on the connected set
  for (int32_t c : fx.cells->cells) CHECK(T.values[static_cast<size_t>(c)] > 0.0);
}

TEST_CASE("solve_heat_field: conservation, positivity and linearity on random masked grids") {
  oracle::Rng rng(11);
  for (int trial = 0; trial < 6; ++trial) {
    RegionSpec spec;
    const int nx = rng.uniform_int(8, 40), ny = rng.uniform_int(8, 40);
    spec.outer = {0, 0, nx * 0.2, ny * 0.2};
    spec.spacing = 0.2;
    if (trial % 2 == 1) spec.holes = {{0.4, 0.4, 0.4 + nx * 0.04, 0.4 + ny * 0.04}};
    RegionGrid g;
    try {
      g = build_region(spec);
    } catch (const std::exception&) {
      continue;  // rare disconnected layout
    }
    auto cells = std::make_shared<CellSet>(CellSet::of(g, g.masked_cells()));

    FieldParams params;
    params.alpha = rng.uniform(0.2, 4.0);
    params.beta = rng.uniform(0.2, 4.0);
    ScalarField h1 = ScalarField::zeros(g, cells), h2 = ScalarField::zeros(g, cells);
    for (int32_t c : cells->cells) {
      h1.values[static_cast<size_t>(c)] = rng.uniform(0.0, 3.0);
      h2.values[static_cast<size_t>(c)] = rng.uniform(0.0, 1.0);
    }
    const ScalarField T1 = solve_heat_field(h1, params);
    const ScalarField T2 = solve_heat_field(h2, params);

    double sT1 = 0.0, sh1 = 0.0;
    for (int32_t c : cells->cells) {
      sT1 += T1.values[static_cast<size_t>(c)];
      sh1 += h1.values[static_cast<size_t>(c)];
      CHECK(T1.values[static_cast<size_t>(c)] >= 0.0);
    }
    CHECK(params.beta * sT1 == doctest::Approx(sh1).epsilon(1e-6));

    // linearity within solver tolerance
    ScalarField hsum = ScalarField::zeros(g, cells);
    for (int32_t c : cells->cells)
      hsum.values[static_cast<size_t>(c)] =
          h1.values[static_cast<size_t>(c)] + h2.values[static_cast<size_t>(c)];
    const ScalarField Tsum = solve_heat_field(hsum, params);
    double max_dev = 0.0, scale = 0.0;
    for (int32_t c : cells->cells) {
      max_dev = std::max(max_dev, std::abs(Tsum.values[static_cast<size_t>(c)] -
                                           T1.values[static_cast<size_t>(c)] -
                                           T2.values[static_cast<size_t>(c)]));
      scale = std::max(scale, std::abs(Tsum.values[static_cast<size_t>(c)]));
    }
    CHECK(max_dev <= 1e-6 * (scale + 1.0));
  }
}

TEST_CASE("zero-source equivalence holds in both directions") {
  const Fixture fx(4, 4, 0.2);
  const FieldParams params;
  SUBCASE("h == 0 implies T == 0 and zero gradient") {
    const ScalarField T = solve_heat_field(fx.field(0.0), params);
    CHECK(T.max_abs() <= 1e-10);
    oracle::Rng rng(5);
    for (int i = 0; i < 20; ++i) {
      const Vec2 p{rng.uniform(0.3, 3.7), rng.uniform(0.3, 3.7)};
      const Vec2 gvec = sample_gradient(T, p);
      CHECK(norm(gvec) <= 1e-10);
    }
  }
  SUBCASE("nonzero normalized h implies a visible field") {
    const ScalarField T = solve_heat_field(fx.gaussian({2, 2}, 1.0), params);
    CHECK(T.max_abs() > 1e-10);
  }
}

TEST_CASE("solve_heat_field error paths") {
  const Fixture fx(2, 2, 0.1);
  FieldParams params;
  SUBCASE("negative source") {
    ScalarField h = fx.field(1.0);
    h.values[static_cast<size_t>(fx.cells->cells[7])] = -0.5;
    CHECK_THROWS_WITH_AS(solve_heat_field(h, params), doctest::Contains("negative source"),
                         std::invalid_argument);
  }
  SUBCASE("non-convergence") {
    params.solver_max_iter = 1;
    CHECK_THROWS_WITH_AS(solve_heat_field(fx.gaussian({1, 1}, 0.5), params),
                         doctest::Contains("converge"), std::runtime_error);
  }
  SUBCASE("bad parameters") {
    params.alpha = 0.0;
    CHECK_THROWS_AS(solve_heat_field(fx.field(1.0), params), std::invalid_argument);
  }
}

TEST_CASE("sample_gradient: constant and linear reproduction") {
  const Fixture fx(4, 3, 0.1);
  SUBCASE("constant field has zero gradient") {
    const ScalarField f = fx.field(3.25);
    oracle::Rng rng(2);
    for (int i = 0; i < 20; ++i) {
      const Vec2 gvec = sample_gradient(f, {rng.uniform(0, 4), rng.uniform(0, 3)});
      CHECK(norm(gvec) <= 1e-12);
    }
  }
  SUBCASE("linear-in-x field has unit x gradient in the interior") {
    ScalarField f = fx.field(0.0);
    for (int32_t c : fx.cells->cells) f.values[static_cast<size_t>(c)] = fx.grid.center(c).x;
    oracle::Rng rng(3);
    for (int i = 0; i < 20; ++i) {
      const Vec2 gvec = sample_gradient(f, {rng.uniform(0.5, 3.5), rng.uniform(0.5, 2.5)});
      CHECK(gvec.x == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(std::abs(gvec.y) <= 1e-9);
    }
  }
}

TEST_CASE("sample_gradient matches the finite-difference oracle") {
  // At any cell-center abscissa the interpolant's centered quotient equals
  // the blended central difference exactly; elsewhere the two estimators
  // differ by O(h * f''), so this check uses a gently curved smooth field.
  RegionSpec spec;
  spec.outer = {0, 0, 6, 6};
  spec.spacing = 0.1;
  const RegionGrid g = build_region(spec);
  auto cells = std::make_shared<CellSet>(CellSet::of(g, g.masked_cells()));
  ScalarField f = ScalarField::zeros(g, cells);
  for (int32_t c : cells->cells) {
    const Vec2 p = g.center(c);
    f.values[static_cast<size_t>(c)] =
        0.4 + 1.0 * p.x + 0.7 * p.y + 0.005 * (p.x * p.x - 0.5 * p.x * p.y + p.y * p.y);
  }
  oracle::Rng rng(9);
  const double delta = 1e-5;
  for (int i = 0; i < 100; ++i) {
    const Vec2 p{rng.uniform(0.5, 5.5), rng.uniform(0.5, 5.5)};
    const Vec2 got = sample_gradient(f, p);
    const double fx = (f.value_at({p.x + delta, p.y}) - f.value_at({p.x - delta, p.y})) / (2 * delta);
    const double fy = (f.value_at({p.x, p.y + delta}) - f.value_at({p.x, p.y - delta})) / (2 * delta);
    CHECK(got.x == doctest::Approx(fx).epsilon(1e-3));
    CHECK(got.y == doctest::Approx(fy).epsilon(1e-3));
  }

  // Gaussian field probed at cell centers: the quotient averages the two
  // adjacent interpolation slopes, which is exactly the central difference.
  const Fixture fxg(6, 6, 0.2);
  const ScalarField gauss = fxg.gaussian({3, 3}, 4.0, 2.0);
  oracle::Rng rng2(10);
  for (int i = 0; i < 50; ++i) {
    const Vec2 p = fxg.grid.center(fxg.grid.idx(rng2.uniform_int(3, 26), rng2.uniform_int(3, 26)));
    const Vec2 got = sample_gradient(gauss, p);
    const double fx =
        (gauss.value_at({p.x + delta, p.y}) - gauss.value_at({p.x - delta, p.y})) / (2 * delta);
    const double fy =
        (gauss.value_at({p.x, p.y + delta}) - gauss.value_at({p.x, p.y - delta})) / (2 * delta);
    CHECK(got.x == doctest::Approx(fx).epsilon(1e-6));
    CHECK(got.y == doctest::Approx(fy).epsilon(1e-6));
  }
}

TEST_CASE("value_at reproduces cell values and interpolates between centers") {
  const Fixture fx(2, 1, 0.5);
  ScalarField f = fx.field(0.0);
  for (int32_t c : fx.cells->cells) f.values[static_cast<size_t>(c)] = fx.grid.center(c).x * 2.0;
  for (int32_t c : fx.cells->cells)
    CHECK(f.value_at(fx.grid.center(c)) == doctest::Approx(f.values[static_cast<size_t>(c)]));
  CHECK(f.value_at({1.0, 0.25}) == doctest::Approx(2.0));  // midway between the 0.75 and 1.25 centers
}

TEST_CASE("local_maxima: unimodal, constant and bimodal fields") {
  const Fixture fx(6, 6, 0.2);
  SUBCASE("single Gaussian peak") {
    const ScalarField f = fx.gaussian({3.1, 2.9}, 2.0);
    const std::vector<Vec2> maxima = local_maxima(f);
    REQUIRE(maxima.size() == 1);
    CHECK(distance(maxima[0], {3.1, 2.9}) <= fx.grid.spacing);
  }
  SUBCASE("constant field has no maxima") { CHECK(local_maxima(fx.field(7.0)).empty()); }
  SUBCASE("two well-separated peaks match the 8-neighbor oracle") {
    ScalarField f = fx.field(0.0);
    for (int32_t c : fx.cells->cells) {
      const Vec2 p = fx.grid.center(c);
      const Vec2 d1 = p - Vec2{1.5, 1.5}, d2 = p - Vec2{4.5, 4.5};
      f.values[static_cast<size_t>(c)] =
          2.0 * std::exp(-dot(d1, d1) / 0.8) + 1.0 * std::exp(-dot(d2, d2) / 0.8);
    }
    const std::vector<Vec2> maxima = local_maxima(f);

    // independent 8-neighbor dominance scan
    std::vector<Vec2> expect;
    const RegionGrid& g = fx.grid;
    for (int32_t c : fx.cells->cells) {
      const double vc = f.values[static_cast<size_t>(c)];
      bool ge_all = true, gt_one = false;
      for (int dj = -1; dj <= 1; ++dj)
        for (int di = -1; di <= 1; ++di) {
          if (di == 0 && dj == 0) continue;
          const int ni = g.cell_i(c) + di, nj = g.cell_j(c) + dj;
          if (!g.in_grid(ni, nj) || !fx.cells->contains(g.idx(ni, nj))) continue;
          const double vn = f.values[static_cast<size_t>(g.idx(ni, nj))];
          if (vn > vc) ge_all = false;
          if (vn < vc) gt_one = true;
        }
      if (ge_all && gt_one) expect.push_back(g.center(c));
    }
    REQUIRE(maxima.size() == expect.size());
    REQUIRE(maxima.size() == 2);
    CHECK(distance(maxima[0], {1.5, 1.5}) <= g.spacing);  // higher peak first
    CHECK(distance(maxima[1], {4.5, 4.5}) <= g.spacing);
  }
}

TEST_CASE("temperature maxima with negative-definite Hessian sit on positive source") {
  oracle::Rng rng(21);
  const Fixture fx(5, 5, 0.1);
  const FieldParams params;
  for (int trial = 0; trial < 3; ++trial) {
    ScalarField h = fx.field(0.0);
    for (int blob = 0; blob < 3; ++blob) {
      const Vec2 c{rng.uniform(1, 4), rng.uniform(1, 4)};
      const double w = rng.uniform(0.3, 1.5), amp = rng.uniform(0.5, 2.0);
      for (int32_t cell : fx.cells->cells) {
        const Vec2 d = fx.grid.center(cell) - c;
        h.values[static_cast<size_t>(cell)] += amp * std::exp(-dot(d, d) / w);
      }
    }
    const ScalarField T = solve_heat_field(h, params);
    const std::vector<Vec2> maxima = local_maxima(T);
    int checked = 0;
    for (const Vec2& m : maxima) {
      const int32_t cell = fx.grid.cell_of(m);
      const auto hess = hessian_at(T, cell);
      if (!hess || !negative_definite(*hess)) continue;
      CHECK(h.values[static_cast<size_t>(cell)] > 0.0);
      ++checked;
    }
    CHECK(checked > 0);
  }
}

TEST_CASE("hessian_at needs a full 8-neighborhood") {
  const Fixture fx(1, 1, 0.25);
  const ScalarField f = fx.field(1.0);
  CHECK_FALSE(hessian_at(f, fx.grid.idx(0, 0)).has_value());
  CHECK(hessian_at(f, fx.grid.idx(1, 1)).has_value());
}
