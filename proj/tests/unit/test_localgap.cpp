#include <doctest.h>

#include <random>

#include "oracles/bloch.hpp"
#include "oracles/dense.hpp"
#include "sloc/lattice.hpp"
#include "sloc/linalg.hpp"
#include "sloc/localgap.hpp"

using namespace sloc;

namespace {

// Hermitian perturbation with random entries on the given sites.
HermitianOperator random_local(Index dim, const std::vector<Index>& sites, double scale,
                               std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<Triplet> upper;
  for (std::size_t a = 0; a < sites.size(); ++a) {
    upper.emplace_back(sites[a], sites[a], Complex(scale * g(rng), 0.0));
    for (std::size_t b = a + 1; b < sites.size(); ++b) {
      upper.emplace_back(std::min(sites[a], sites[b]), std::max(sites[a], sites[b]),
                         Complex(scale * g(rng), scale * g(rng)));
    }
  }
  return HermitianOperator::from_upper(dim, upper);
}

// g from a dense eigen solve of the restricted square.
double dense_gap(const HermitianOperator& H, const SiteLattice& lat, const Vec2& x, double rho, double e) {
  const auto kept = lat.sites_within(x, rho);
  const DenseMatrix h = H.shifted(e).dense();
  DenseMatrix c(h.rows(), static_cast<Index>(kept.size()));
  for (std::size_t k = 0; k < kept.size(); ++k) c.col(static_cast<Index>(k)) = h.col(kept[k]);
  return std::sqrt(std::max(0.0, oracle::eigenvalues(c.adjoint() * c)(0)));
}

}  // namespace

TEST_SUITE("localgap") {

TEST_CASE("constant_hamiltonian") {
  const Model m = build_haldane(4, 4, HaldaneParams::haldane_default());
  const HermitianOperator c = HermitianOperator::identity(m.lattice.size(), 0.7);
  for (double rho : {1.5, 3.0, 10.0}) {
    CHECK(local_gap(c, m.lattice, m.lattice.center(), rho, 0.2).g_rho == doctest::Approx(0.5));
  }
}

TEST_CASE("matches_dense_restricted_square") {
  const Model m = build_haldane(8, 8, {1.0, 0.4, 1.1, 0.3});
  for (double rho : {2.0, 4.0, 7.0}) {
    for (double e : {0.0, 0.35}) {
      const auto r = local_gap(m.hamiltonian, m.lattice, m.lattice.center(), rho, e);
      CHECK(r.g_rho == doctest::Approx(dense_gap(m.hamiltonian, m.lattice, m.lattice.center(), rho, e)).epsilon(1e-8));
      CHECK(r.kept_sites == static_cast<Index>(m.lattice.sites_within(m.lattice.center(), rho).size()));
      CHECK(r.g_rho * r.g_rho == doctest::Approx(r.min_eig_restricted_square));
    }
  }
}

TEST_CASE("global_gap_is_a_lower_bound") {
  const oracle::Haldane op{1.0, 0.5, 1.5707963267948966, 0.0};
  const Model m = build_haldane(4, 4, {op.t, op.t_c, op.phi, op.M}, Boundary::Periodic);
  const double global = oracle::eigenvalues(m.hamiltonian.dense()).cwiseAbs().minCoeff();
  for (double rho : {1.0, 2.0, 4.0, 20.0}) {
    for (Index s = 0; s < m.lattice.size(); s += 5) {
      CHECK(local_gap(m.hamiltonian, m.lattice, m.lattice.position(s), rho).g_rho >= global - 1e-9);
    }
  }
}

TEST_CASE("monotone_in_radius") {
  const Model m = build_haldane(10, 10, HaldaneParams::haldane_default());
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ux(0.0, m.lattice.upper_corner().x());
  std::uniform_real_distribution<double> uy(0.0, m.lattice.upper_corner().y());
  std::uniform_real_distribution<double> ur(1.0, 9.0);
  for (int i = 0; i < 20; ++i) {
    const Vec2 x(ux(rng), uy(rng));
    double r1 = ur(rng), r2 = ur(rng);
    if (r1 > r2) std::swap(r1, r2);
    if (m.lattice.sites_within(x, r1).empty()) continue;
    const double g1 = local_gap(m.hamiltonian, m.lattice, x, r1).g_rho;
    const double g2 = local_gap(m.hamiltonian, m.lattice, x, r2).g_rho;
    CHECK(g1 >= g2 - 1e-9);
  }
}

TEST_CASE("exterior_perturbations_leave_the_gap_unchanged") {
  const Model m = build_haldane(10, 10, HaldaneParams::haldane_default());
  const Vec2 x = m.lattice.center();
  std::vector<Index> outside;
  for (Index i = 0; i < m.lattice.size(); ++i) {
    if ((m.lattice.position(i) - x).norm() >= 4.0) outside.push_back(i);
  }
  std::mt19937_64 rng(5);
  std::vector<Index> pick(outside.begin(), outside.begin() + 12);
  const HermitianOperator w = random_local(m.lattice.size(), pick, 2.0, rng);
  const auto a = local_gap(m.hamiltonian, m.lattice, x, 4.0);
  const auto b = local_gap(m.hamiltonian + w, m.lattice, x, 4.0);
  CHECK(a.g_rho == b.g_rho);
}

TEST_CASE("weyl_type_inequality") {
  const Model m = build_haldane(10, 10, HaldaneParams::haldane_default());
  const SiteLattice& lat = m.lattice;
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<Index> site(0, lat.size() - 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int checked = 0;
  while (checked < 15) {
    const Vec2 x = lat.position(site(rng));
    const Vec2 y = lat.position(site(rng));
    const double rho = 2.0 + 4.0 * u(rng);
    if (distance_to_region(y, x, rho) <= 0.5) continue;
    const HermitianOperator w = random_local(lat.size(), lat.sites_within(y, 1.8), 0.3 * u(rng), rng);
    const double rhs = weyl_bound_rhs(m.hamiltonian, w, lat, x, rho, y);
    const double g0 = local_gap(m.hamiltonian, lat, x, rho).g_rho;
    const double g1 = local_gap(m.hamiltonian + w, lat, x, rho).g_rho;
    CHECK(g1 >= g0 - rhs - 1e-9);
    ++checked;
  }
}

TEST_CASE("weyl_bound_single_site") {
  const Model m = build_haldane(6, 6, HaldaneParams::haldane_default());
  const Vec2 x = m.lattice.position(0);
  const Index far = m.lattice.size() - 1;
  const Vec2 y = m.lattice.position(far);
  RealVector d = RealVector::Zero(m.lattice.size());
  d(far) = 0.25;
  const HermitianOperator w = HermitianOperator::diagonal(d);
  const double dist = (y - x).norm() - 2.0;
  const double h = linalg::norm2(m.hamiltonian.matrix());
  CHECK(weyl_bound_rhs(m.hamiltonian, w, m.lattice, x, 2.0, y) == doctest::Approx(0.25 * (2 * h + 0.25) / dist));
  CHECK(weyl_bound_rhs(m.hamiltonian, HermitianOperator::diagonal(RealVector::Zero(m.lattice.size())),
                       m.lattice, x, 2.0, y) == 0.0);
  CHECK_THROWS_AS(weyl_bound_rhs(m.hamiltonian, w, m.lattice, x, 2.0, x), InvalidArgument);
}

TEST_CASE("tapered_inequality") {
  const Model m = build_haldane(8, 8, HaldaneParams::haldane_default());
  const Vec2 x = m.lattice.center();
  const double rho = 5.0;
  const double g = local_gap(m.hamiltonian, m.lattice, x, rho).g_rho;
  const TaperingProfile f(TaperFamily::Beta, 1.0);
  const DenseMatrix fm = tapered_multiplier(m.lattice, x, rho, f).dense();
  const DenseMatrix h = m.hamiltonian.dense();
  const DenseMatrix q = fm * h * h * fm - g * g * fm * fm;
  const double hn = oracle::spectral_norm(h);
  CHECK(oracle::eigenvalues(q)(0) >= -1e-9 * hn * hn);
}

TEST_CASE("lipschitz_in_energy") {
  const Model m = build_haldane(8, 8, HaldaneParams::haldane_default());
  const Vec2 x = m.lattice.center();
  double prev = local_gap(m.hamiltonian, m.lattice, x, 4.0, 0.0).g_rho;
  for (int i = 1; i <= 10; ++i) {
    const double e = 0.1 * i;
    const double g = local_gap(m.hamiltonian, m.lattice, x, 4.0, e).g_rho;
    CHECK(std::abs(g - prev) <= 0.1 + 1e-9);
    prev = g;
  }
}

TEST_CASE("profile_matches_pointwise") {
  const Model m = build_haldane(8, 8, HaldaneParams::haldane_default());
  std::vector<Vec2> path;
  for (int i = 0; i < 4; ++i) path.emplace_back(2.0 + 2.0 * i, 5.0);
  const auto prof = local_gap_profile(m.hamiltonian, m.lattice, path, 3.0, 0.0, 2);
  for (std::size_t i = 0; i < path.size(); ++i) {
    CHECK(prof[i].g_rho == local_gap(m.hamiltonian, m.lattice, path[i], 3.0).g_rho);
  }
  CHECK_THROWS_AS(local_gap_profile(m.hamiltonian, m.lattice, {}, 3.0), InvalidArgument);
  CHECK_THROWS_AS(local_gap(m.hamiltonian, m.lattice, Vec2(-100.0, -100.0), 1.0), InvalidArgument);
}

TEST_CASE("window_dos") {
  const HermitianOperator zero = HermitianOperator::diagonal(RealVector::Zero(10));
  const double s = 0.05;
  CHECK(dos_window(zero, 0.0, s) == doctest::Approx(1.0 / (s * std::sqrt(2.0 * M_PI))));
  const Model m = build_haldane(6, 6, HaldaneParams::haldane_default(), Boundary::Periodic);
  const RealVector e = oracle::eigenvalues(m.hamiltonian.dense());
  double integral = 0.0;
  const double de = 0.002;
  for (double en = -6.0; en <= 6.0; en += de) integral += dos_window(e, m.lattice.size(), en, s) * de;
  CHECK(integral == doctest::Approx(1.0).epsilon(1e-6));
  // Inside the bulk gap of the clean periodic model.
  double peak = 0.0;
  for (double en = -4.0; en <= 4.0; en += 0.01) peak = std::max(peak, dos_window(e, m.lattice.size(), en, 0.1));
  CHECK(dos_window(e, m.lattice.size(), 0.0, 0.1) < 1e-6 * peak);
  const RealVector ldos = ldos_window(m.hamiltonian, 0.5, s);
  CHECK(ldos.mean() == doctest::Approx(dos_window(m.hamiltonian, 0.5, s)).epsilon(1e-10));
  CHECK_THROWS_AS(dos_window(e, 10, 0.0, 0.0), InvalidArgument);
}

}
