#include <doctest.h>

#include <random>

#include "oracles/dense.hpp"
#include "sloc/lattice.hpp"
#include "sloc/linalg.hpp"

using namespace sloc;

TEST_SUITE("linalg") {

TEST_CASE("eigh_matches_eigen") {
  std::mt19937_64 rng(1);
  for (Index n : {1, 5, 40}) {
    const DenseMatrix a = oracle::random_hermitian(n, rng);
    const auto ed = linalg::eigh(a);
    CHECK((ed.values - oracle::eigenvalues(a)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((linalg::eigvalsh(a) - ed.values).cwiseAbs().maxCoeff() < 1e-12);
    const DenseMatrix rec = ed.vectors * ed.values.cast<Complex>().asDiagonal() * ed.vectors.adjoint();
    CHECK((rec - a).norm() < 1e-11);
  }
}

TEST_CASE("inertia_matches_eigenvalue_signs") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const DenseMatrix a = oracle::random_hermitian(30, rng);
    const double shift = 0.3 * (trial % 5 - 2);
    const auto in = linalg::inertia(a, shift);
    const auto ref = oracle::sign_counts(a - shift * DenseMatrix::Identity(30, 30), 0.0);
    CHECK(in.positive == ref.positive);
    CHECK(in.negative == ref.negative);
    CHECK(in.zero == 0);
  }
}

TEST_CASE("inertia_counts_exact_zeros") {
  RealVector d(6);
  d << -2.0, -1.0, 0.0, 0.0, 1.0, 3.0;
  const DenseMatrix a = d.cast<Complex>().asDiagonal();
  const auto in = linalg::inertia(a, 0.0, 1e-12);
  CHECK(in.positive == 2);
  CHECK(in.negative == 2);
  CHECK(in.zero == 2);
}

TEST_CASE("nearest_eigenpairs_sparse_and_dense_paths") {
  // Large enough to take the shift-invert Lanczos path.
  const Model m = build_haldane(20, 20, HaldaneParams::haldane_default());
  const SparseMatrix& h = m.hamiltonian.matrix();
  const RealVector all = oracle::eigenvalues(m.hamiltonian.dense());
  for (double sigma : {0.0, 0.7}) {
    linalg::LanczosOptions lo;
    lo.vectors = true;
    const auto ne = linalg::nearest_eigenpairs(h, sigma, 4, lo);
    std::vector<double> ref(all.data(), all.data() + all.size());
    std::sort(ref.begin(), ref.end(), [&](double a, double b) { return std::abs(a - sigma) < std::abs(b - sigma); });
    // The spectrum is symmetric, so pairs at equal distance may come in either order.
    std::vector<double> got(ne.values.data(), ne.values.data() + 4);
    ref.resize(4);
    std::sort(got.begin(), got.end());
    std::sort(ref.begin(), ref.end());
    for (int i = 0; i < 4; ++i) {
      CHECK(got[static_cast<std::size_t>(i)] == doctest::Approx(ref[static_cast<std::size_t>(i)]).epsilon(1e-10));
      const Vector v = ne.vectors.col(i);
      CHECK((h * v - ne.values(i) * v).norm() < 1e-8);
    }
  }
  CHECK(linalg::smallest_abs_eigenvalue(h) == doctest::Approx(all.cwiseAbs().minCoeff()).epsilon(1e-10));
}

TEST_CASE("smallest_eigenvalue_of_psd_matrix") {
  const Model m = build_haldane(18, 18, {1.0, 0.5, 1.2, 0.4});
  const SparseMatrix sq = m.hamiltonian.matrix() * m.hamiltonian.matrix();
  const RealVector e = oracle::eigenvalues(m.hamiltonian.dense());
  const double ref = e.cwiseAbs().minCoeff();
  CHECK(std::sqrt(linalg::smallest_eigenvalue_psd(sq)) == doctest::Approx(ref).epsilon(1e-8));
}

TEST_CASE("norms") {
  std::mt19937_64 rng(4);
  const DenseMatrix a = oracle::random_hermitian(25, rng);
  const SparseMatrix s = a.sparseView();
  CHECK(linalg::norm2(a) == doctest::Approx(oracle::spectral_norm(a)).epsilon(1e-12));
  CHECK(linalg::norm2(s) == doctest::Approx(oracle::spectral_norm(a)).epsilon(1e-12));
  CHECK(linalg::norm_inf(s) >= linalg::norm2(s));
  const Model m = build_haldane(24, 24, HaldaneParams::haldane_default());
  const SparseMatrix& h = m.hamiltonian.matrix();
  auto op = [&](const Vector& v) -> Vector { return h * v; };
  const double big = linalg::largest_singular_value(op, op, h.cols());
  CHECK(big == doctest::Approx(linalg::norm2(h)).epsilon(1e-8));
  CHECK(big == doctest::Approx(oracle::eigenvalues(m.hamiltonian.dense()).cwiseAbs().maxCoeff()).epsilon(1e-8));
}

}
