#include "sloc/bounds.hpp"

#include <cmath>

#include "sloc/linalg.hpp"
#include "sloc/localgap.hpp"
#include "sloc/parallel.hpp"

namespace sloc {

BoundParams BoundParams::from_ab(double a, double b, double C_F) {
  BoundParams p;
  p.a = a;
  p.b = b;
  p.C_F = C_F;
  if (!(1.0 - a - b * b > 0.0)) throw InvalidArgument("bound parameters need 1 - a - b^2 > 0");
  p.c = std::sqrt(a / (1.0 - a - b * b));
  p.validate();
  return p;
}

void BoundParams::validate() const {
  if (!(a >= 0.0) || !(b > 0.0) || !(b < 1.0) || !(c >= 0.0)) {
    throw InvalidArgument("bound parameters need a >= 0, 0 < b < 1, c >= 0");
  }
  if (!(1.0 - a - b * b > 0.0)) throw InvalidArgument("bound parameters need 1 - a - b^2 > 0");
  if (std::abs(c * c * (1.0 - a - b * b) - a) > 1e-12) {
    throw InvalidArgument("c is inconsistent with c^2 = a / (1 - a - b^2)");
  }
  if (!(C_F > 0.0)) throw InvalidArgument("C_F must be positive");
}

std::string to_string(WindowVariant v) {
  switch (v) {
    case WindowVariant::Cond10: return "cond10";
    case WindowVariant::Cond11: return "cond11";
    case WindowVariant::Cond12: return "cond12";
    case WindowVariant::Criterion2d: return "criterion2d";
    case WindowVariant::Defect: return "defect";
  }
  return "unknown";
}

namespace {

void require_gap(double g_rho, double rho) {
  if (!(g_rho > 0.0)) throw InvalidArgument("kappa window needs a positive local gap");
  if (!(rho > 0.0)) throw InvalidArgument("rho must be positive");
}

// The Hamiltonian on the Dirac operator's space: H (x) 1_2 in 2D, H in 1D.
SparseMatrix lifted(const HermitianOperator& H, const DiracOperator& D) {
  if (H.dim() != D.sites()) throw InvalidArgument("operator and Dirac sizes differ");
  return D.dim() == D.sites() ? H.matrix() : doubled(H.matrix());
}

KappaWindow make_window(double g, double rho, double upper, WindowVariant v) {
  KappaWindow w;
  w.lower = 2.0 * g / rho;
  w.upper = upper;
  w.admissible = w.lower < w.upper;
  w.variant = v;
  return w;
}

KappaWindow resolvent_window(const HermitianOperator& H, const DiracOperator& D, double g,
                             double rho, const BoundParams& p, double alpha, WindowVariant v) {
  const SparseMatrix comm = commutator_with_dirac(H, D);
  // At alpha = 0 the resolvent is the unitary scalar -i and ||(H (x) 1) R|| = ||H||.
  const double hr = alpha == 0.0 ? linalg::norm2(H.matrix()) : damped_norm(lifted(H, D), D, alpha);
  const double cr = damped_norm(comm, D, alpha);
  const double upper = g * g * g / (p.prefactor() * (p.C_F * hr + g) * cr);
  return make_window(g, rho, upper, v);
}

}  // namespace

KappaWindow kappa_window_cond10(const HermitianOperator& H, const DiracOperator& D, double g_rho,
                                double rho, const BoundParams& params, double kappa) {
  require_gap(g_rho, rho);
  params.validate();
  if (!(kappa > 0.0)) throw InvalidArgument("kappa probe must be positive");
  KappaWindow w = resolvent_window(H, D, g_rho, rho, params, params.c * kappa / g_rho,
                                   WindowVariant::Cond10);
  w.kappa_probe = kappa;
  return w;
}

KappaWindow kappa_window_cond12(const HermitianOperator& H, const DiracOperator& D, double g_rho,
                                double rho, const BoundParams& params) {
  require_gap(g_rho, rho);
  params.validate();
  return resolvent_window(H, D, g_rho, rho, params, 2.0 * params.c / rho, WindowVariant::Cond12);
}

RelativeWindows kappa_window_relative(const HermitianOperator& H, const DiracOperator& D,
                                      double g_rho, double rho, const BoundParams& params,
                                      std::optional<double> kappa_probe) {
  RelativeWindows out{std::nullopt, kappa_window_cond12(H, D, g_rho, rho, params)};
  if (kappa_probe) out.cond10 = kappa_window_cond10(H, D, g_rho, rho, params, *kappa_probe);
  return out;
}

KappaWindow kappa_window_global(const HermitianOperator& H, const DiracOperator& D, double g_rho,
                                double rho, double b, double C_F) {
  require_gap(g_rho, rho);
  if (!(b > 0.0 && b < 1.0)) throw InvalidArgument("b must lie in (0, 1)");
  const double hn = linalg::norm2(H.matrix());
  const double cn = linalg::norm2(commutator_with_dirac(H, D));
  const double upper = g_rho * g_rho * g_rho / ((1.0 / (1.0 - b * b)) * (C_F * hn + g_rho) * cn);
  return make_window(g_rho, rho, upper, WindowVariant::Cond11);
}

KappaWindow kappa_window_criterion2d(const HermitianOperator& H, const DiracOperator& D,
                                     double g_rho, double rho, const BoundParams& params) {
  require_gap(g_rho, rho);
  params.validate();
  const double alpha = 2.0 * params.c / rho;
  const double hr = damped_norm(H.matrix(), D, alpha, DampingMode::AbsD);
  const double cr = damped_norm(commutator_block(H.matrix(), D), D, alpha, DampingMode::AbsD);
  const double g = g_rho;
  const double upper = g * g * g / (params.prefactor() * (params.C_F * hr + g) * cr);
  return make_window(g, rho, upper, WindowVariant::Criterion2d);
}

FixedPoint solve_kappa_fixed_point(const HermitianOperator& H, const DiracOperator& D,
                                   double g_rho, double rho, const BoundParams& params,
                                   int max_iter, double rel_tol) {
  FixedPoint fp;
  double kappa = kappa_window_cond12(H, D, g_rho, rho, params).upper;
  for (int it = 1; it <= max_iter; ++it) {
    const double next = kappa_window_cond10(H, D, g_rho, rho, params, kappa).upper;
    fp.residual = std::abs(next - kappa) / kappa;
    fp.iterations = it;
    kappa = next;
    if (fp.residual <= rel_tol) {
      fp.converged = true;
      break;
    }
  }
  fp.kappa = kappa;
  return fp;
}

KappaWindow defect_bound(const HermitianOperator& H, const HermitianOperator& W,
                         const SiteLattice& lat, const Vec2& x, const Vec2& y, double rho,
                         double C_F, double energy) {
  if (!(rho > 0.0)) throw InvalidArgument("rho must be positive");
  if ((x - y).norm() == 0.0) throw InvalidArgument("defect centre y must differ from x");
  const double g = local_gap(H + W, lat, x, rho, energy).g_rho;
  const HermitianOperator h = H.shifted(energy);
  const DiracOperator D(lat, x);
  const RealVector weight = (1.0 + distances(lat, y).array()).matrix();
  const SparseMatrix wy = scale_columns(W.matrix(), weight);
  const double q = 1.0 + (x - y).squaredNorm();
  const double hn = linalg::norm2(h.matrix());
  const double cn = linalg::norm2(commutator_with_dirac(h, D));
  const double wyn = linalg::norm2(wy);
  const double wcn = linalg::norm2(commutator_with_dirac(wy, D));
  const double denom = (5.0 / 3.0) * (C_F * hn + 4.0 * C_F * rho * wyn / q + g) *
                       (cn + 4.0 * rho * wcn / q);
  KappaWindow w = make_window(g, rho, denom > 0.0 ? g * g * g / denom : 0.0, WindowVariant::Defect);
  return w;
}

std::vector<ScanCell> admissible_region_scan(const HermitianOperator& H, const SiteLattice& lat,
                                             const Vec2& x, const std::vector<double>& rho_grid,
                                             const std::vector<double>& kappa_grid,
                                             const BoundParams& params, WindowVariant variant,
                                             double energy, int threads) {
  if (rho_grid.empty() || kappa_grid.empty()) throw InvalidArgument("scan grids must be nonempty");
  params.validate();
  const HermitianOperator h = H.shifted(energy);
  const DiracOperator D(lat, x);
  const std::size_t nk = kappa_grid.size();

  std::vector<double> gaps(rho_grid.size());
  parallel_for(rho_grid.size(), threads,
               [&](std::size_t i) { gaps[i] = local_gap(H, lat, x, rho_grid[i], energy).g_rho; });

  // kappa-independent variants need one evaluation per rho.
  std::vector<std::optional<KappaWindow>> per_rho(rho_grid.size());
  if (variant != WindowVariant::Cond10) {
    parallel_for(rho_grid.size(), threads, [&](std::size_t i) {
      const double g = gaps[i], rho = rho_grid[i];
      if (!(g > 0.0)) return;
      switch (variant) {
        case WindowVariant::Cond11:
          per_rho[i] = kappa_window_global(h, D, g, rho, params.b, params.C_F);
          break;
        case WindowVariant::Criterion2d:
          per_rho[i] = kappa_window_criterion2d(h, D, g, rho, params);
          break;
        default:
          per_rho[i] = kappa_window_cond12(h, D, g, rho, params);
      }
    });
  }

  std::vector<ScanCell> cells(rho_grid.size() * nk);
  parallel_for(cells.size(), threads, [&](std::size_t idx) {
    const std::size_t i = idx / nk, j = idx % nk;
    ScanCell& c = cells[idx];
    c.rho = rho_grid[i];
    c.kappa = kappa_grid[j];
    c.g_rho = gaps[i];
    if (!(c.g_rho > 0.0)) {
      c.window.variant = variant;
      return;
    }
    if (variant == WindowVariant::Cond10) {
      c.window = kappa_window_cond10(h, D, c.g_rho, c.rho, params, c.kappa);
    } else {
      c.window = *per_rho[i];
      c.window.kappa_probe = c.kappa;
    }
    c.admissible = c.window.contains(c.kappa);
  });
  return cells;
}

}  // namespace sloc
