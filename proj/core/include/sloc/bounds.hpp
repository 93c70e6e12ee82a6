#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sloc/hermitian_operator.hpp"
#include "sloc/lattice.hpp"
#include "sloc/operators.hpp"
#include "sloc/types.hpp"

namespace sloc {

/// Constants of the relative kappa bound; c^2 = a / (1 - a - b^2).
struct BoundParams {
  double a = 0.15;
  double b = 0.5;
  double c = 0.5;
  double C_F = 2.0;

  static BoundParams from_ab(double a, double b, double C_F);
  void validate() const;
  /// 1 / (1 - a - b^2)
  double prefactor() const { return 1.0 / (1.0 - a - b * b); }
};

enum class WindowVariant { Cond10, Cond11, Cond12, Criterion2d, Defect };

std::string to_string(WindowVariant v);

/// kappa must satisfy lower < kappa <= upper.
struct KappaWindow {
  double lower = 0.0;
  double upper = 0.0;
  bool admissible = false;
  WindowVariant variant = WindowVariant::Cond12;
  std::optional<double> kappa_probe;

  bool contains(double kappa) const { return kappa > lower && kappa <= upper; }
};

/// Norms entering the relative windows for one (H, D) pair.
struct RelativeWindows {
  std::optional<KappaWindow> cond10;  ///< only with a kappa probe
  KappaWindow cond12;
};

/// Upper edge g^3 / [(1-a-b^2)^{-1} (C_F ||H R|| + g) ||[D,H] R||] with
/// R = (i + alpha D)^{-1}; alpha = c kappa / g (cond10) or 2c / rho (cond12).
RelativeWindows kappa_window_relative(const HermitianOperator& H, const DiracOperator& D,
                                      double g_rho, double rho, const BoundParams& params,
                                      std::optional<double> kappa_probe = std::nullopt);

KappaWindow kappa_window_cond10(const HermitianOperator& H, const DiracOperator& D, double g_rho,
                                double rho, const BoundParams& params, double kappa);
KappaWindow kappa_window_cond12(const HermitianOperator& H, const DiracOperator& D, double g_rho,
                                double rho, const BoundParams& params);

/// Global-norm form: upper = g^3 / [(1-b^2)^{-1} (C_F ||H|| + g) ||[D,H]||].
KappaWindow kappa_window_global(const HermitianOperator& H, const DiracOperator& D, double g_rho,
                                double rho, double b, double C_F);

/// Two-dimensional convenience form: prefactor (1-a-b^2)^{-1}, resolvent
/// (i + (2c/rho)|X - x|)^{-1} and the single block [X1 + i X2, H].
KappaWindow kappa_window_criterion2d(const HermitianOperator& H, const DiracOperator& D,
                                     double g_rho, double rho, const BoundParams& params);

struct FixedPoint {
  double kappa = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Iterates kappa <- upper_cond10(kappa) from the cond12 upper edge.
FixedPoint solve_kappa_fixed_point(const HermitianOperator& H, const DiracOperator& D,
                                   double g_rho, double rho, const BoundParams& params,
                                   int max_iter = 50, double rel_tol = 1e-8);

/// Window for H + W with a defect W damped around y:
/// upper = g^3 / [(5/3)(C_F||H|| + 4 C_F rho ||W(y)|| / q + g)(||[D,H]|| + 4 rho ||[W(y),D]|| / q)]
/// with W(y) = W (1 + |X - y|), q = 1 + |x - y|^2 and g = g_rho(H + W, x).
KappaWindow defect_bound(const HermitianOperator& H, const HermitianOperator& W,
                         const SiteLattice& lat, const Vec2& x, const Vec2& y, double rho,
                         double C_F, double energy = 0.0);

struct ScanCell {
  double rho = 0.0;
  double kappa = 0.0;
  double g_rho = 0.0;
  KappaWindow window;
  bool admissible = false;  ///< kappa lies inside the window
};

/// Admissibility of every (kappa, rho) pair; cond10 is evaluated at each kappa.
std::vector<ScanCell> admissible_region_scan(const HermitianOperator& H, const SiteLattice& lat,
                                             const Vec2& x, const std::vector<double>& rho_grid,
                                             const std::vector<double>& kappa_grid,
                                             const BoundParams& params,
                                             WindowVariant variant = WindowVariant::Cond10,
                                             double energy = 0.0, int threads = 1);

}  // namespace sloc
