#pragma once

#include <vector>

#include "sloc/hermitian_operator.hpp"
#include "sloc/lattice.hpp"
#include "sloc/operators.hpp"
#include "sloc/types.hpp"

namespace sloc {

struct LocalGapResult {
  double g_rho = 0.0;
  double rho = 0.0;
  Vec2 x = Vec2::Zero();
  double energy = 0.0;
  double min_eig_restricted_square = 0.0;
  Index kept_sites = 0;
};

/// sqrt of the smallest eigenvalue of the restriction of (H - E)^2 to the
/// region around x. The square is formed on the whole lattice first.
LocalGapResult local_gap(const HermitianOperator& H, const SiteLattice& lat, const Vec2& x,
                         double rho, double energy = 0.0, RegionShape shape = RegionShape::Ball);

/// Restriction of (H - E)^2 to `kept`; the rows of (H - E) on the kept sites
/// times their adjoint.
SparseMatrix restricted_square(const HermitianOperator& H, const std::vector<Index>& kept,
                               double energy);

/// local_gap for every centre on the path, in path order.
std::vector<LocalGapResult> local_gap_profile(const HermitianOperator& H, const SiteLattice& lat,
                                              const std::vector<Vec2>& path, double rho,
                                              double energy = 0.0, int threads = 1);

/// Distance from y to the region around x (0 inside its closure).
double distance_to_region(const Vec2& y, const Vec2& x, double rho,
                          RegionShape shape = RegionShape::Ball);

/// (1/dist(y, B_rho(x))) * ||(1 + |X - y|) W|| * (2||H|| + ||W||).
double weyl_bound_rhs(const HermitianOperator& H, const HermitianOperator& W,
                      const SiteLattice& lat, const Vec2& x, double rho, const Vec2& y,
                      RegionShape shape = RegionShape::Ball);

/// Gaussian window DOS per site: sum_n exp(-(E_n - E)^2 / (2 sigma^2)) / (sigma sqrt(2 pi)) / N.
double dos_window(const RealVector& eigenvalues, Index n_sites, double energy, double sigma);
double dos_window(const HermitianOperator& H, double energy, double sigma);

/// Window LDOS per site from a full eigendecomposition.
RealVector ldos_window(const HermitianOperator& H, double energy, double sigma);

inline constexpr double default_dos_sigma = 0.05;

}  // namespace sloc
