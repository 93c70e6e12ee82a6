#include "sloc/localizer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sloc/linalg.hpp"
#include "sloc/operators.hpp"

namespace sloc {

void Probe::validate() const {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw InvalidArgument("probe radius rho must be positive");
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw InvalidArgument("probe kappa must be positive");
  if (!std::isfinite(energy) || !x.allFinite()) throw InvalidArgument("probe centre and energy must be finite");
}

RealVector LocalizerMatrix::distance() const {
  const Index n = site_distance.size();
  RealVector d(2 * n);
  d << site_distance, site_distance;
  return d;
}

SparseMatrix graded(const SparseMatrix& a) {
  const Index n = a.rows();
  std::vector<Triplet> t;
  for (Index c = 0; c < a.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(a, c); it; ++it) {
      t.emplace_back(it.row(), c, -it.value());
      t.emplace_back(n + it.row(), n + c, it.value());
    }
  }
  SparseMatrix out(2 * n, 2 * n);
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

LocalizerMatrix assemble(const HermitianOperator& H, const SiteLattice& lat, const Probe& probe,
                         const std::optional<std::vector<Index>>& lambda) {
  probe.validate();
  if (H.dim() != lat.size()) throw InvalidArgument("operator and lattice sizes differ");
  LocalizerMatrix lm;
  lm.probe = probe;
  const std::vector<Index> ball = lat.sites_within(probe.x, probe.rho, probe.shape);
  if (lambda) {
    lm.sites = *lambda;
    std::sort(lm.sites.begin(), lm.sites.end());
    lm.sites.erase(std::unique(lm.sites.begin(), lm.sites.end()), lm.sites.end());
    if (!std::includes(lm.sites.begin(), lm.sites.end(), ball.begin(), ball.end())) {
      throw InvalidArgument("Lambda must contain every site of the probe region");
    }
  } else {
    lm.sites = ball;
  }
  if (lm.sites.empty()) throw InvalidArgument("localizer region keeps no sites");

  const SparseMatrix h = restrict(H.matrix(), lm.sites);
  const DiracOperator d(lat, probe.x, lm.sites);
  const Index n = h.rows();
  lm.site_distance = d.distance();

  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(2 * h.nonZeros() + 4 * n));
  for (Index c = 0; c < h.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(h, c); it; ++it) {
      t.emplace_back(it.row(), c, -it.value());
      t.emplace_back(n + it.row(), n + c, it.value());
    }
  }
  for (Index k = 0; k < n; ++k) {
    if (probe.energy != 0.0) {
      t.emplace_back(k, k, Complex(probe.energy, 0.0));
      t.emplace_back(n + k, n + k, Complex(-probe.energy, 0.0));
    }
    const Complex z = probe.kappa * d.d0()(k);
    if (z == Complex(0.0, 0.0)) continue;
    t.emplace_back(k, n + k, std::conj(z));
    t.emplace_back(n + k, k, z);
  }
  lm.matrix.resize(2 * n, 2 * n);
  lm.matrix.setFromTriplets(t.begin(), t.end());
  lm.matrix.makeCompressed();
  return lm;
}

double localizer_gap(const LocalizerMatrix& lm) {
  if (lm.dim() <= linalg::dense_threshold) {
    return linalg::eigvalsh(DenseMatrix(lm.matrix)).cwiseAbs().minCoeff();
  }
  return linalg::smallest_abs_eigenvalue(lm.matrix);
}

std::optional<int> IndexResult::index() const {
  if (gap_closed || n_zero > 0 || signature() % 2 != 0) return std::nullopt;
  return static_cast<int>(signature() / 2);
}

double default_zero_tol(const LocalizerMatrix& lm) { return 1e-8 * linalg::norm_inf(lm.matrix); }

IndexResult half_signature(const SparseMatrix& l, double zero_tol, std::optional<double> mu) {
  if (!(zero_tol >= 0.0)) throw InvalidArgument("zero tolerance must be >= 0");
  IndexResult out;
  out.zero_tol = zero_tol;
  if (mu) {
    out.mu = *mu;
  } else {
    out.mu = l.rows() <= linalg::dense_threshold
                 ? linalg::eigvalsh(DenseMatrix(l)).cwiseAbs().minCoeff()
                 : linalg::smallest_abs_eigenvalue(l);
  }
  const DenseMatrix dense(l);
  if (out.mu > zero_tol) {
    const auto in = linalg::inertia(dense);
    out.n_plus = in.positive;
    out.n_minus = in.negative;
    out.n_zero = in.zero;
  } else {
    // Count eigenvalues below -tol and above +tol with two shifted factorizations.
    out.n_minus = linalg::inertia(dense, -zero_tol).negative;
    out.n_plus = linalg::inertia(dense, zero_tol).positive;
    out.n_zero = l.rows() - out.n_plus - out.n_minus;
  }
  out.gap_closed = out.n_zero > 0 || out.mu <= zero_tol;
  return out;
}

IndexResult half_signature(const LocalizerMatrix& lm, std::optional<double> zero_tol) {
  return half_signature(lm.matrix, zero_tol ? *zero_tol : default_zero_tol(lm), localizer_gap(lm));
}

VolumeCheckReport volume_independence_check(const HermitianOperator& H, const SiteLattice& lat,
                                            const Probe& probe,
                                            const std::vector<std::vector<Index>>& lambdas,
                                            double b) {
  VolumeCheckReport rep;
  rep.b = b;
  rep.g_rho = local_gap(H, lat, probe.x, probe.rho, probe.energy, probe.shape).g_rho;
  std::ostringstream diag;
  bool ok = !lambdas.empty();
  std::optional<Index> sig;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const LocalizerMatrix lm = assemble(H, lat, probe, lambdas[i]);
    const IndexResult r = half_signature(lm);
    rep.results.push_back(r);
    rep.lambda_sizes.push_back(static_cast<Index>(lm.sites.size()));
    if (r.gap_closed) {
      ok = false;
      diag << "Lambda " << i << ": gap closed (mu=" << r.mu << ", n_zero=" << r.n_zero << ")\n";
      continue;
    }
    if (r.mu < b * rep.g_rho) {
      ok = false;
      diag << "Lambda " << i << ": mu=" << r.mu << " below b*g_rho=" << b * rep.g_rho << "\n";
    }
    if (sig && *sig != r.signature()) {
      ok = false;
      diag << "Lambda " << i << ": signature " << r.signature() << " differs from " << *sig << "\n";
    }
    if (!sig) sig = r.signature();
  }
  rep.consistent = ok;
  rep.diagnostics = diag.str();
  return rep;
}

}  // namespace sloc
