#include <doctest.h>

#include <random>

#include "oracles/dense.hpp"
#include "sloc/hermitian_operator.hpp"
#include "sloc/lattice.hpp"
#include "sloc/operators.hpp"

using namespace sloc;

TEST_SUITE("operators") {

TEST_CASE("hermitian_operator_construction") {
  const HermitianOperator a = HermitianOperator::from_upper(3, {{0, 1, {1.0, 2.0}}, {1, 1, {3.0, 0.0}},
                                                                 {0, 1, {0.5, 0.0}}});
  CHECK(a.matrix().coeff(0, 1) == Complex(1.5, 2.0));
  CHECK(a.matrix().coeff(1, 0) == Complex(1.5, -2.0));
  CHECK(a.matrix().coeff(1, 1) == Complex(3.0, 0.0));
  CHECK_THROWS_AS(HermitianOperator::from_upper(2, {{0, 0, {1.0, 1.0}}}), InvalidArgument);
  CHECK_THROWS_AS(HermitianOperator::from_upper(2, {{1, 0, {1.0, 0.0}}}), InvalidArgument);
  SparseMatrix bad(2, 2);
  bad.insert(0, 1) = 1.0;
  CHECK_THROWS_AS(HermitianOperator{bad}, InvalidArgument);
  const HermitianOperator s = a.shifted(1.0) + HermitianOperator::identity(3);
  CHECK(s == a);
  CHECK((a - a).matrix().norm() == 0.0);
  CHECK(a.scaled(2.0).matrix().coeff(1, 1) == Complex(6.0, 0.0));
}

TEST_CASE("dirac_operator_squares_to_distance_squared") {
  const Model m = build_haldane(4, 4, HaldaneParams::haldane_default());
  const Vec2 x(2.1, 3.3);
  const DiracOperator d(m.lattice, x);
  CHECK(d.dim() == 2 * m.lattice.size());
  const DenseMatrix dm = DenseMatrix(d.matrix());
  CHECK((dm - dm.adjoint()).norm() == 0.0);
  const DenseMatrix sq = dm * dm;
  for (Index i = 0; i < m.lattice.size(); ++i) {
    const double r2 = (m.lattice.position(i) - x).squaredNorm();
    CHECK(sq(i, i).real() == doctest::Approx(r2));
    CHECK(sq(i + m.lattice.size(), i + m.lattice.size()).real() == doctest::Approx(r2));
    CHECK(d.distance()(i) == doctest::Approx(std::sqrt(r2)));
  }
  CHECK((sq - DenseMatrix(sq.diagonal().asDiagonal())).norm() < 1e-12);
}

TEST_CASE("dirac_operator_one_dimension") {
  const Model m = build_ssh(4, 1.0, 0.5);
  const DiracOperator d(m.lattice, Vec2(2.5, 0.0));
  CHECK(d.dim() == 8);
  CHECK(d.d0()(0) == Complex(-2.5, 0.0));
  CHECK(d.d0()(7) == Complex(4.5, 0.0));
}

TEST_CASE("commutator_with_dirac_is_anti_hermitian") {
  const Model m = build_haldane(4, 4, {1.0, 0.4, 0.8, 0.1});
  const DiracOperator d(m.lattice, m.lattice.center());
  const DenseMatrix c = DenseMatrix(commutator_with_dirac(m.hamiltonian, d));
  const DenseMatrix hd = DenseMatrix(doubled(m.hamiltonian.matrix()));
  const DenseMatrix dm = DenseMatrix(d.matrix());
  CHECK((c - (dm * hd - hd * dm)).norm() < 1e-12);
  CHECK((c + c.adjoint()).norm() < 1e-12);
}

TEST_CASE("commutator_with_dirac_one_dimension") {
  const Model m = build_ssh(5, 1.0, 0.3);
  const DiracOperator d(m.lattice, Vec2(1.7, 0.0));
  const DenseMatrix c = DenseMatrix(commutator_with_dirac(m.hamiltonian, d));
  const DenseMatrix dm = DenseMatrix(d.matrix());
  const DenseMatrix h = m.hamiltonian.dense();
  CHECK((c - (dm * h - h * dm)).norm() < 1e-12);
}

TEST_CASE("damped_norm_matches_dense_resolvent") {
  const Model m = build_haldane(3, 4, HaldaneParams::haldane_default());
  const DiracOperator d(m.lattice, m.lattice.center());
  const double alpha = 0.4;
  const SparseMatrix a = doubled(m.hamiltonian.matrix());
  const DenseMatrix dm = DenseMatrix(d.matrix());
  const DenseMatrix id = DenseMatrix::Identity(d.dim(), d.dim());
  const DenseMatrix r = (Complex(0.0, 1.0) * id + alpha * dm).inverse();
  CHECK(damped_norm(a, d, alpha) == doctest::Approx(oracle::spectral_norm(DenseMatrix(a) * r)).epsilon(1e-8));

  DenseMatrix absd = DenseMatrix::Zero(d.dim(), d.dim());
  for (Index i = 0; i < d.dim(); ++i) absd(i, i) = d.distance()(i % d.sites());
  const DenseMatrix ra = (Complex(0.0, 1.0) * id + alpha * absd).inverse();
  CHECK(damped_norm(a, d, alpha, DampingMode::AbsD) ==
        doctest::Approx(oracle::spectral_norm(DenseMatrix(a) * ra)).epsilon(1e-8));
}

TEST_CASE("resolvent_and_adjoint") {
  const Model m = build_haldane(3, 3, HaldaneParams::haldane_default());
  const DiracOperator d(m.lattice, Vec2(1.0, 1.0));
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  Vector u(d.dim()), v(d.dim());
  for (Index i = 0; i < d.dim(); ++i) {
    u(i) = {g(rng), g(rng)};
    v(i) = {g(rng), g(rng)};
  }
  for (bool abs_mode : {false, true}) {
    const Complex lhs = v.dot(d.apply_resolvent(u, 0.7, abs_mode));
    const Complex rhs = d.apply_resolvent_adjoint(v, 0.7, abs_mode).dot(u);
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }
  const Vector back = d.apply_resolvent(u, 0.7);
  const Vector again = Complex(0.0, 1.0) * back + 0.7 * d.apply(back);
  CHECK((again - u).norm() < 1e-12);
}

TEST_CASE("restriction_and_support") {
  const Model m = build_haldane(5, 5, HaldaneParams::haldane_default());
  const Restriction r = make_restriction(m.lattice, m.lattice.center(), 3.0);
  const HermitianOperator hr = restrict(m.hamiltonian, r);
  CHECK(hr.dim() == static_cast<Index>(r.kept.size()));
  for (std::size_t a = 0; a < r.kept.size(); ++a) {
    for (std::size_t b = 0; b < r.kept.size(); ++b) {
      CHECK(hr.matrix().coeff(static_cast<Index>(a), static_cast<Index>(b)) ==
            m.hamiltonian.matrix().coeff(r.kept[a], r.kept[b]));
    }
  }
  SparseMatrix w(m.lattice.size(), m.lattice.size());
  w.insert(3, 7) = 1.0;
  w.insert(7, 3) = 1.0;
  CHECK(support(w) == std::vector<Index>{3, 7});
}

TEST_CASE("tapered_multiplier_profile") {
  const Model m = build_haldane(6, 6, HaldaneParams::haldane_default());
  const Vec2 x = m.lattice.center();
  const TaperingProfile f(TaperFamily::Beta, 1.0);
  const HermitianOperator fm = tapered_multiplier(m.lattice, x, 4.0, f);
  for (Index i = 0; i < m.lattice.size(); ++i) {
    const double r = (m.lattice.position(i) - x).norm() / 4.0;
    const double v = fm.matrix().coeff(i, i).real();
    if (r <= 0.5) CHECK(v == 1.0);
    if (r >= 1.0) CHECK(v == 0.0);
    CHECK(v == doctest::Approx(f(r)));
  }
}

}
