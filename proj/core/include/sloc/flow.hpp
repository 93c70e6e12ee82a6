#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "sloc/hermitian_operator.hpp"
#include "sloc/lattice.hpp"
#include "sloc/localizer.hpp"
#include "sloc/types.hpp"

namespace sloc {

/// Piecewise-linear probe path x(t), t in [0, 1] by arc length, with the
/// site set Lambda on which every localizer along the path is built.
struct ProbePath {
  std::vector<Vec2> waypoints;
  std::vector<double> t_grid;
  std::vector<Index> lambda;

  Vec2 at(double t) const;
  double length() const;
  void validate() const;

  /// Lambda = sites within rho of the path plus sites within 3 rho / 2 of
  /// either endpoint; t_grid uniform with `samples` points.
  static ProbePath through(const SiteLattice& lat, std::vector<Vec2> waypoints, double rho,
                           int samples);
};

struct Crossing {
  double t = 0.0;
  int direction = 0;  ///< +1 when an eigenvalue goes from negative to positive
};

struct SpectrumSample {
  double t = 0.0;
  RealVector eigenvalues;  ///< closest to zero, ascending
};

struct FlowOptions {
  int tracked = 8;            ///< eigenpairs followed per sample
  double min_overlap = 0.8;   ///< eigenvector matching threshold
  int max_refinements = 12;   ///< bisection depth per grid interval
  std::optional<double> zero_tol;
};

struct FlowResult {
  int flow = 0;                               ///< index(x1) - index(x0)
  std::array<IndexResult, 2> endpoints;
  std::vector<Crossing> crossings;
  int crossing_flow = 0;                      ///< signed crossing count
  bool tracking_converged = false;
  bool method_agreement = false;
  std::vector<SpectrumSample> spectrum;
};

/// Spectral flow of t -> L^Lambda(H, x(t)) along the path.
FlowResult spectral_flow(const HermitianOperator& H, const SiteLattice& lat, const Probe& probe,
                         const ProbePath& path, const FlowOptions& opts = {});

struct FlowStabilityReport {
  bool stable = false;
  FlowResult clean;
  FlowResult perturbed;
  std::vector<double> t;
  std::vector<double> mu_perturbed;  ///< localizer gap of H + W on Lambda
};

/// Compares spectral_flow(H + W) with spectral_flow(H); W must vanish on both
/// endpoint balls.
FlowStabilityReport flow_stability_check(const HermitianOperator& H, const HermitianOperator& W,
                                         const SiteLattice& lat, const Probe& probe,
                                         const ProbePath& path, const FlowOptions& opts = {});

/// || |X - x| phi || - (||H|| + |mu|) / kappa for an eigenpair of lm.
double kernel_locality_check(const LocalizerMatrix& lm, double mu, const Vector& phi, double h_norm);

struct PerturbationCoefficients {
  double mu10 = 0.0;
  double mu01 = 0.0;
  double mu11 = 0.0;
  double lambda0 = 0.0;   ///< eigenvalue of L closest to zero
  double gap = 0.0;       ///< distance to the rest of the spectrum
  Vector phi;
};

/// First-order and cross coefficients of the eigenvalue of L + xV + sW that
/// starts at the simple eigenvalue of L closest to zero.
PerturbationCoefficients perturbation_coefficients(const DenseMatrix& L, const DenseMatrix& V,
                                                   const DenseMatrix& W, double tol = 1e-10);

struct SlopeRow {
  double s = 0.0;
  double shift = 0.0;          ///< |mu(s) - mu(0)|
  double shift_bound = 0.0;
  double slope_shift = 0.0;    ///< |d_x mu(s) - d_x mu(0)|
  double slope_bound = 0.0;
};

struct SlopeReport {
  double mu0 = 0.0;
  double slope0 = 0.0;
  double g_l = 0.0;
  std::vector<SlopeRow> rows;
};

/// Measures how a perturbation s W moves a near-zero localizer eigenvalue and
/// its slope along `direction` at the probe, against the bounds
/// s ||<X>^-1 W <X>^-1|| (1 + ||H||/kappa)^2 and s (d/g_L) ||W <X>^-1|| (kappa + ||H||).
SlopeReport slope_bound_check(const HermitianOperator& H, const HermitianOperator& W,
                              const SiteLattice& lat, const Probe& probe, const Vec2& direction,
                              const std::vector<Index>& lambda, const std::vector<double>& s_grid);

}  // namespace sloc
