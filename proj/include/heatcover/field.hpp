#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "heatcover/geometry.hpp"

namespace heatcover {

/// Grid-sampled scalar defined on a cell set. Off-center queries use
/// bilinear interpolation over the cell-center lattice; queries outside the
/// cell set clamp to the nearest defined cell.
struct ScalarField {
  const RegionGrid* region = nullptr;
  std::shared_ptr<const CellSet> cells;
  std::vector<double> values;  // grid-sized, zero outside the cell set

  static ScalarField zeros(const RegionGrid& region, std::shared_ptr<const CellSet> cells);

  double at(int32_t cell) const { return values[static_cast<size_t>(cell)]; }
  double value_at(Vec2 p) const;

  double max_abs() const;
  bool constant_on_cells(double tol = 0.0) const;
};

struct FieldParams {
  double alpha = 1.0;  // thermal diffusivity
  double beta = 1.0;   // global cooling coefficient
  double solver_tol = 1e-10;
  int solver_max_iter = 20000;
};

struct SolveStats {
  long calls = 0;
  long iterations = 0;
  int max_iterations = 0;
};

/// Solve beta*T - alpha*Lap(T) = h on the source's cell set with reflected
/// ghost cells at every face whose neighbor is outside the set (discrete
/// homogeneous Neumann). Matrix-free Jacobi-preconditioned CG; the residual
/// satisfies ||r||_2 <= tol*(||h||_2 + 1). The discrete operator is an SPD
/// M-matrix, so T >= 0 and beta*sum(T) == sum(h) up to solver tolerance.
ScalarField solve_heat_field(const ScalarField& source, const FieldParams& params,
                             const std::vector<double>* warm_start = nullptr,
                             SolveStats* stats = nullptr);

/// Gradient of the bilinear interpolant at p: per-cell central differences
/// (one-sided at cell-set boundaries), bilinearly interpolated.
Vec2 sample_gradient(const ScalarField& field, Vec2 p);

/// Cell centers that dominate their in-set 8-neighborhood (>= all, > at
/// least one), plus the strict global maximum when the field is
/// non-constant. Sorted by descending value, ties to the lowest cell index.
/// Constant fields yield an empty list.
std::vector<Vec2> local_maxima(const ScalarField& field);

struct Hessian2 {
  double xx = 0.0, xy = 0.0, yy = 0.0;
};

/// 3x3-stencil finite-difference Hessian; nullopt unless all 8 neighbors
/// are inside the cell set.
std::optional<Hessian2> hessian_at(const ScalarField& field, int32_t cell);

/// Both eigenvalues below -eps.
bool negative_definite(const Hessian2& h, double eps = 1e-9);

}  // namespace heatcover
