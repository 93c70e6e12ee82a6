#include <algorithm>
#include <cmath>

#include "sloc/flow.hpp"
#include "sloc/linalg.hpp"
#include "sloc/operators.hpp"

namespace sloc {

PerturbationCoefficients perturbation_coefficients(const DenseMatrix& L, const DenseMatrix& V,
                                                   const DenseMatrix& W, double tol) {
  const Index n = L.rows();
  if (n < 2 || L.cols() != n || V.rows() != n || V.cols() != n || W.rows() != n || W.cols() != n) {
    throw InvalidArgument("perturbation matrices must be square and of equal size");
  }
  const linalg::EigenDecomposition ed = linalg::eigh(L);
  Index i0 = 0;
  ed.values.cwiseAbs().minCoeff(&i0);
  const double l0 = ed.values(i0);
  double gap = std::numeric_limits<double>::infinity();
  for (Index j = 0; j < n; ++j) {
    if (j != i0) gap = std::min(gap, std::abs(ed.values(j) - l0));
  }
  const double scale = std::max(1.0, ed.values.cwiseAbs().maxCoeff());
  if (gap <= tol * scale) throw InvalidArgument("eigenvalue closest to zero is not simple");

  PerturbationCoefficients pc;
  pc.lambda0 = l0;
  pc.gap = gap;
  pc.phi = ed.vectors.col(i0);
  const Vector vphi = V * pc.phi;
  const Vector wphi = W * pc.phi;
  pc.mu10 = pc.phi.dot(vphi).real();
  pc.mu01 = pc.phi.dot(wphi).real();
  // Reduced resolvent of L on the complement of phi.
  const Vector a = ed.vectors.adjoint() * vphi;
  const Vector b = ed.vectors.adjoint() * wphi;
  Complex sum = 0.0;
  for (Index j = 0; j < n; ++j) {
    if (j != i0) sum += std::conj(a(j)) * b(j) / (ed.values(j) - l0);
  }
  pc.mu11 = -2.0 * sum.real();
  return pc;
}

namespace {

struct Tracked {
  double value = 0.0;
  Vector vector;
};

// Eigenpair of lm near `sigma` with the largest overlap with `ref`.
Tracked follow(const LocalizerMatrix& lm, double sigma, const Vector& ref) {
  linalg::LanczosOptions lo;
  lo.vectors = true;
  const auto ne = linalg::nearest_eigenpairs(lm.matrix, sigma, 3, lo);
  Index best = 0;
  const RealVector ov = (ne.vectors.adjoint() * ref).cwiseAbs();
  if (ov.maxCoeff(&best) < 0.9) throw ConvergenceError("lost track of the localizer eigenvalue", ov.maxCoeff());
  return {ne.values(best), ne.vectors.col(best)};
}

}  // namespace

SlopeReport slope_bound_check(const HermitianOperator& H, const HermitianOperator& W,
                              const SiteLattice& lat, const Probe& probe, const Vec2& direction,
                              const std::vector<Index>& lambda, const std::vector<double>& s_grid) {
  probe.validate();
  if (!(direction.norm() > 0.0)) throw InvalidArgument("direction must be nonzero");
  if (W.dim() != H.dim()) throw InvalidArgument("perturbation and Hamiltonian sizes differ");
  const Vec2 u = direction.normalized();
  constexpr double h = 0.01;

  auto localizer = [&](double dx, double s) {
    Probe p = probe;
    p.x = probe.x + dx * u;
    return assemble(s == 0.0 ? H : H + W.scaled(s), lat, p, lambda);
  };

  const LocalizerMatrix l0 = localizer(0.0, 0.0);
  linalg::LanczosOptions lo;
  lo.vectors = true;
  const auto near0 = linalg::nearest_eigenpairs(l0.matrix, 0.0, 3, lo);
  SlopeReport rep;
  rep.mu0 = near0.values(0);
  const Vector phi0 = near0.vectors.col(0);
  {
    const auto around = linalg::nearest_eigenpairs(l0.matrix, rep.mu0, 2);
    rep.g_l = std::abs(around.values(1) - around.values(0));
  }
  auto mu = [&](double dx, double s) { return follow(localizer(dx, s), rep.mu0, phi0).value; };
  auto slope = [&](double s) { return (mu(h, s) - mu(-h, s)) / (2.0 * h); };
  rep.slope0 = slope(0.0);

  // Norms on Lambda with <X> = 1 + |X - x|.
  const SparseMatrix w = restrict(W.matrix(), l0.sites);
  const RealVector inv_x = (1.0 + l0.site_distance.array()).inverse().matrix();
  const double w_sandwich = linalg::norm2(scale_rows(scale_columns(w, inv_x), inv_x));
  const double w_right = linalg::norm2(scale_columns(w, inv_x));
  const double h_norm = linalg::norm2(restrict(H.shifted(probe.energy).matrix(), l0.sites));
  const double d = lat.dimension();
  const double kappa = probe.kappa;

  for (double s : s_grid) {
    SlopeRow row;
    row.s = s;
    row.shift = std::abs(mu(0.0, s) - rep.mu0);
    row.shift_bound = std::abs(s) * w_sandwich * std::pow(1.0 + h_norm / kappa, 2);
    row.slope_shift = std::abs(slope(s) - rep.slope0);
    row.slope_bound = std::abs(s) * (d / rep.g_l) * w_right * (kappa + h_norm);
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace sloc
