#include "sloc/tapering.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "sloc/linalg.hpp"
#include "sloc/operators.hpp"
#include "sloc/parallel.hpp"

namespace sloc {

namespace {

using std::numbers::pi;
using Gauss = boost::math::quadrature::gauss<double, 20>;

// I(p) = int_0^{1/2} cos(p u) psi(u) du with psi(u) = phi(1/2 + u), so that
// |hat phi(p)| = |I(p)| / pi. Panels are at most half a cosine period wide.
double cosine_moment(const TaperingProfile& f, double p) {
  const double width = std::min(0.05, p > 0.0 ? pi / p : 0.05);
  const int panels = std::max(10, static_cast<int>(std::ceil(0.5 / width)));
  const double h = 0.5 / panels;
  auto integrand = [&](double u) { return std::cos(p * u) * f.phi(0.5 + u); };

  double sum = 0.0;
  for (int i = 0; i + 1 < panels; ++i) sum += Gauss::integrate(integrand, i * h, (i + 1) * h);

  // Last panel: u = 1/2 - s^4 smooths the (1/2 - u)^k endpoint behaviour of
  // the beta family (the exp family is flat there anyway).
  const double s_max = std::pow(h, 0.25);
  auto endpoint = [&](double s) {
    const double s3 = s * s * s;
    const double d = s3 * s;
    const double psi = f.family() == TaperFamily::Beta
                           ? (f.k() == 0.0 ? 1.0 : std::pow(d * (1.0 - d), f.k()))
                           : f.phi(1.0 - d);
    return std::cos(p * (0.5 - d)) * psi * 4.0 * s3;
  };
  constexpr int sub = 4;
  for (int i = 0; i < sub; ++i) {
    sum += Gauss::integrate(endpoint, s_max * i / sub, s_max * (i + 1) / sub);
  }
  return sum;
}

// int over [a, b] of |I(p)| |sin(p/2)|.
double outer_piece(const TaperingProfile& f, double a, double b) {
  auto g = [&](double p) { return std::abs(cosine_moment(f, p)) * std::abs(std::sin(0.5 * p)); };
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, a, b, 6, 1e-7);
}

struct PowerFit {
  double log_a = 0.0;
  double s = 0.0;
};

// Least squares fit c_j ~ A (j + 1/2)^{-s} over j in [lo, hi).
PowerFit fit_power(const std::vector<double>& c, std::size_t lo, std::size_t hi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(hi - lo);
  for (std::size_t j = lo; j < hi; ++j) {
    const double x = std::log(static_cast<double>(j) + 0.5);
    const double y = std::log(std::max(c[j], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {(sy - slope * sx) / n, -slope};
}

}  // namespace

double phi_hat_abs(const TaperingProfile& f, double p) {
  return std::abs(cosine_moment(f, std::abs(p))) / pi;
}

CfFourierResult cf_fourier_detailed(const TaperingProfile& f, const CfFourierOptions& opts) {
  // C_F = (8 / (pi C_phi)) int_0^inf |I(p)| |sin(p/2)| dp; one block spans 4 pi.
  const double scale = 8.0 / (pi * f.c_phi());
  std::vector<double> blocks;
  auto extend = [&](std::size_t n) {
    while (blocks.size() < n) {
      const double a = 4.0 * pi * static_cast<double>(blocks.size());
      blocks.push_back(scale * (outer_piece(f, a, a + 2.0 * pi) + outer_piece(f, a + 2.0 * pi, a + 4.0 * pi)));
    }
  };

  CfFourierResult prev;
  bool have_prev = false;
  for (std::size_t J = static_cast<std::size_t>(opts.initial_blocks);
       J <= static_cast<std::size_t>(opts.max_blocks); J *= 2) {
    extend(J);
    CfFourierResult cur;
    for (std::size_t j = 0; j < J; ++j) cur.truncated += blocks[j];
    const PowerFit fit = fit_power(blocks, J / 2, J);
    cur.decay_exponent = fit.s;
    cur.p_max = 4.0 * pi * static_cast<double>(J);
    if (fit.s <= 1.05) {
      if (J >= 64) {
        throw ConvergenceError("C_F integral for " + f.name() +
                                   " diverges: tail decays like p^-" + std::to_string(fit.s),
                               fit.s);
      }
    } else {
      const double jj = static_cast<double>(J);
      cur.tail = std::exp(fit.log_a) * std::pow(jj, 1.0 - fit.s) / (fit.s - 1.0);
    }
    cur.value = cur.truncated + cur.tail;
    if (have_prev && fit.s > 1.05) {
      cur.tail_uncertainty = std::abs(cur.value - prev.value);
      if (cur.tail_uncertainty <= opts.rel_tol * cur.value) return cur;
    }
    prev = cur;
    have_prev = true;
  }
  throw ConvergenceError("C_F tail for " + f.name() + " not converged", prev.tail_uncertainty);
}

double cf_fourier(const TaperingProfile& f, const CfFourierOptions& opts) {
  return cf_fourier_detailed(f, opts).value;
}

double lattice_extent(const SiteLattice& lat) {
  const Vec2 span = lat.upper_corner() - lat.lower_corner();
  return lat.dimension() == 1 ? span.x() : span.minCoeff();
}

double cf_direct(const HermitianOperator& H, const SiteLattice& lat, const Vec2& x, double rho,
                 const TaperingProfile& f, std::optional<double> delta) {
  if (!(rho > 0.0)) throw InvalidArgument("rho must be positive");
  if (rho > lattice_extent(lat) / 3.0 + 1e-12) {
    throw InvalidArgument("rho exceeds a third of the lattice extent");
  }
  if (delta && !(*delta > 0.0)) throw InvalidArgument("delta must be positive");
  if (H.dim() != lat.size()) throw InvalidArgument("operator and lattice sizes differ");

  const DiracOperator D(lat, x);
  RealVector fv(lat.size());
  for (Index i = 0; i < lat.size(); ++i) fv(i) = f(D.distance()(i) / rho);

  const SparseMatrix& h = H.matrix();
  std::vector<Triplet> t;
  for (Index c = 0; c < h.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(h, c); it; ++it) {
      const double df = fv(it.row()) - fv(c);
      if (df != 0.0) t.emplace_back(it.row(), c, df * it.value());
    }
  }
  SparseMatrix comm_f(h.rows(), h.cols());
  comm_f.setFromTriplets(t.begin(), t.end());
  const SparseMatrix comm_d = commutator_with_dirac(h, D);

  double num, den;
  if (delta) {
    const double alpha = 1.0 / *delta;
    const SparseMatrix lifted = D.dim() == D.sites() ? comm_f : doubled(comm_f);
    num = comm_f.nonZeros() == 0 ? 0.0 : damped_norm(lifted, D, alpha);
    den = damped_norm(comm_d, D, alpha);
  } else {
    num = linalg::norm2(comm_f);
    den = linalg::norm2(comm_d);
  }
  if (!(den > 0.0)) {
    if (num == 0.0) return 0.0;
    throw InvalidArgument("H commutes with the position operators");
  }
  return rho * num / den;
}

std::vector<CfSweepRow> cf_sweep(const HermitianOperator& H, const SiteLattice& lat, const Vec2& x,
                                 const std::vector<double>& rho_grid, TaperFamily family,
                                 const std::vector<double>& k_list, std::optional<double> delta,
                                 int threads) {
  if (rho_grid.empty() || k_list.empty()) throw InvalidArgument("sweep grids must be nonempty");
  std::vector<CfSweepRow> rows(rho_grid.size() * k_list.size());
  parallel_for(rows.size(), threads, [&](std::size_t idx) {
    const double k = k_list[idx / rho_grid.size()];
    const double rho = rho_grid[idx % rho_grid.size()];
    rows[idx] = {k, rho, cf_direct(H, lat, x, rho, TaperingProfile(family, k), delta)};
  });
  return rows;
}

}  // namespace sloc
