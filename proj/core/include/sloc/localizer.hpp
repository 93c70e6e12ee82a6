#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sloc/hermitian_operator.hpp"
#include "sloc/lattice.hpp"
#include "sloc/localgap.hpp"
#include "sloc/types.hpp"

namespace sloc {

struct Probe {
  Vec2 x = Vec2::Zero();
  double rho = 1.0;
  double kappa = 1.0;
  double energy = 0.0;
  RegionShape shape = RegionShape::Ball;

  void validate() const;
};

/// Finite-volume spectral localizer
///   L = [[-(H - E), kappa D0^*], [kappa D0, H - E]]
/// on the sites Lambda (doubled basis: all kept sites, then all again). In one
/// dimension L = [[-(H - E), kappa (X - x)], [kappa (X - x), H - E]] uses the
/// same 2x2 block layout with a real D0.
struct LocalizerMatrix {
  SparseMatrix matrix;
  Probe probe;
  std::vector<Index> sites;  ///< Lambda, sorted

  RealVector site_distance;  ///< |p - x| for each site of Lambda

  Index dim() const { return matrix.rows(); }
  /// |X - x| on the doubled space.
  RealVector distance() const;
};

/// diag(-A, A) on the doubled space, the localizer image of a potential A.
SparseMatrix graded(const SparseMatrix& a);

LocalizerMatrix assemble(const HermitianOperator& H, const SiteLattice& lat, const Probe& probe,
                         const std::optional<std::vector<Index>>& lambda = std::nullopt);

/// min |eigenvalue| of the localizer.
double localizer_gap(const LocalizerMatrix& lm);

struct IndexResult {
  Index n_plus = 0;
  Index n_minus = 0;
  Index n_zero = 0;
  double mu = 0.0;
  double zero_tol = 0.0;
  bool gap_closed = false;

  /// n_plus - n_minus.
  Index signature() const { return n_plus - n_minus; }
  double half_signature() const { return 0.5 * static_cast<double>(signature()); }
  /// Integer marker, defined only for even signature and open gap.
  std::optional<int> index() const;
};

/// Default zero tolerance 1e-8 * ||L||, with ||L|| bounded by the max row sum.
double default_zero_tol(const LocalizerMatrix& lm);

/// Inertia of the localizer by LDL^H factorization; eigenvalues with
/// |lambda| < zero_tol count as zero.
IndexResult half_signature(const LocalizerMatrix& lm, std::optional<double> zero_tol = std::nullopt);
IndexResult half_signature(const SparseMatrix& l, double zero_tol, std::optional<double> mu = std::nullopt);

struct VolumeCheckReport {
  bool consistent = false;
  double g_rho = 0.0;
  double b = 0.5;
  std::vector<IndexResult> results;
  std::vector<Index> lambda_sizes;
  std::string diagnostics;
};

/// Index on each Lambda must agree and satisfy mu >= b * g_rho.
VolumeCheckReport volume_independence_check(const HermitianOperator& H, const SiteLattice& lat,
                                            const Probe& probe,
                                            const std::vector<std::vector<Index>>& lambdas,
                                            double b = 0.5);

/// Sign s with marker = s * Chern number for the conventions of this library,
/// fixed against the momentum-space Chern number of the periodic Haldane model.
inline constexpr int marker_chern_sign = -1;

}  // namespace sloc
