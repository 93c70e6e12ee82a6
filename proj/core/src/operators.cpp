#include "sloc/operators.hpp"

#include <algorithm>
#include <cmath>

#include "sloc/linalg.hpp"

namespace sloc {

// --- HermitianOperator ---------------------------------------------------

HermitianOperator::HermitianOperator(SparseMatrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw InvalidArgument("Hermitian operator must be square");
  m_.makeCompressed();
  if (max_asymmetry(m_) != 0.0) throw InvalidArgument("matrix is not exactly Hermitian");
}

HermitianOperator HermitianOperator::from_upper(Index dim, const std::vector<Triplet>& upper) {
  std::vector<Triplet> all;
  all.reserve(2 * upper.size());
  for (const Triplet& t : upper) {
    if (t.row() < 0 || t.col() >= dim || t.row() > t.col()) {
      throw InvalidArgument("from_upper expects 0 <= row <= col < dim");
    }
    if (t.row() == t.col()) {
      if (t.value().imag() != 0.0) throw InvalidArgument("diagonal entries must be real");
      all.push_back(t);
    } else {
      all.push_back(t);
      all.emplace_back(t.col(), t.row(), std::conj(t.value()));
    }
  }
  SparseMatrix m(dim, dim);
  m.setFromTriplets(all.begin(), all.end());
  return HermitianOperator(std::move(m));
}

HermitianOperator HermitianOperator::diagonal(const RealVector& d) {
  std::vector<Triplet> t;
  for (Index i = 0; i < d.size(); ++i) {
    if (d(i) != 0.0) t.emplace_back(i, i, Complex(d(i), 0.0));
  }
  SparseMatrix m(d.size(), d.size());
  m.setFromTriplets(t.begin(), t.end());
  return HermitianOperator(std::move(m));
}

HermitianOperator HermitianOperator::identity(Index dim, double scale) {
  return diagonal(RealVector::Constant(dim, scale));
}

double HermitianOperator::max_asymmetry(const SparseMatrix& m) {
  const SparseMatrix diff = m - SparseMatrix(m.adjoint());
  double worst = 0.0;
  for (Index c = 0; c < diff.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(diff, c); it; ++it) worst = std::max(worst, std::abs(it.value()));
  }
  return worst;
}

HermitianOperator HermitianOperator::operator+(const HermitianOperator& o) const {
  if (dim() != o.dim()) throw InvalidArgument("dimension mismatch");
  return HermitianOperator(SparseMatrix(m_ + o.m_));
}

HermitianOperator HermitianOperator::operator-(const HermitianOperator& o) const {
  if (dim() != o.dim()) throw InvalidArgument("dimension mismatch");
  return HermitianOperator(SparseMatrix(m_ - o.m_));
}

HermitianOperator HermitianOperator::scaled(double s) const {
  return HermitianOperator(SparseMatrix(s * m_));
}

HermitianOperator HermitianOperator::shifted(double e) const {
  if (e == 0.0) return *this;
  return *this - identity(dim(), e);
}

bool HermitianOperator::operator==(const HermitianOperator& o) const {
  if (dim() != o.dim()) return false;
  const SparseMatrix diff = m_ - o.m_;
  for (Index c = 0; c < diff.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(diff, c); it; ++it) {
      if (it.value() != Complex(0.0, 0.0)) return false;
    }
  }
  return true;
}

// --- DiracOperator -------------------------------------------------------

DiracOperator::DiracOperator(const SiteLattice& lat, const Vec2& center)
    : dimension_(lat.dimension()), center_(center), d0_(lat.size()), dist_(lat.size()) {
  for (Index i = 0; i < lat.size(); ++i) {
    const Vec2 d = lat.position(i) - center;
    d0_(i) = dimension_ == 2 ? Complex(d.x(), d.y()) : Complex(d.x(), 0.0);
    dist_(i) = dimension_ == 2 ? d.norm() : std::abs(d.x());
  }
}

DiracOperator::DiracOperator(const SiteLattice& lat, const Vec2& center,
                             const std::vector<Index>& sites)
    : dimension_(lat.dimension()),
      center_(center),
      d0_(static_cast<Index>(sites.size())),
      dist_(static_cast<Index>(sites.size())) {
  for (std::size_t k = 0; k < sites.size(); ++k) {
    const Vec2 d = lat.position(sites[k]) - center;
    const Index i = static_cast<Index>(k);
    d0_(i) = dimension_ == 2 ? Complex(d.x(), d.y()) : Complex(d.x(), 0.0);
    dist_(i) = dimension_ == 2 ? d.norm() : std::abs(d.x());
  }
}

SparseMatrix DiracOperator::matrix() const {
  const Index n = sites();
  std::vector<Triplet> t;
  if (dimension_ == 1) {
    for (Index i = 0; i < n; ++i) {
      if (d0_(i) != Complex(0.0, 0.0)) t.emplace_back(i, i, d0_(i));
    }
  } else {
    for (Index i = 0; i < n; ++i) {
      if (d0_(i) == Complex(0.0, 0.0)) continue;
      t.emplace_back(i, n + i, std::conj(d0_(i)));
      t.emplace_back(n + i, i, d0_(i));
    }
  }
  SparseMatrix m(dim(), dim());
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

Vector DiracOperator::apply(const Vector& v) const {
  const Index n = sites();
  if (v.size() != dim()) throw InvalidArgument("vector size does not match Dirac operator");
  if (dimension_ == 1) return d0_.cwiseProduct(v);
  Vector out(2 * n);
  out.head(n) = d0_.conjugate().cwiseProduct(v.tail(n));
  out.tail(n) = d0_.cwiseProduct(v.head(n));
  return out;
}

namespace {

// (s + alpha D)(1 + alpha^2 D^2)^{-1} v in 2D, with s = -i for the resolvent
// (i + alpha D)^{-1} and s = +i for its adjoint.
Vector resolvent_2d(const DiracOperator& d, const Vector& v, double alpha, Complex s) {
  const Index n = d.sites();
  const RealVector w = (1.0 + (alpha * d.distance()).array().square()).inverse().matrix();
  Vector scaled(2 * n);
  scaled.head(n) = v.head(n).cwiseProduct(w.cast<Complex>());
  scaled.tail(n) = v.tail(n).cwiseProduct(w.cast<Complex>());
  return s * scaled + alpha * d.apply(scaled);
}

Vector diagonal_resolvent(const Vector& v, const RealVector& diag, double alpha, Complex i_sign,
                          Index blocks) {
  const Index n = diag.size();
  Vector out(v.size());
  for (Index b = 0; b < blocks; ++b) {
    for (Index k = 0; k < n; ++k) out(b * n + k) = v(b * n + k) / (i_sign + alpha * diag(k));
  }
  return out;
}

}  // namespace

Vector DiracOperator::apply_resolvent(const Vector& v, double alpha, bool abs_mode) const {
  const Complex i(0.0, 1.0);
  const Index blocks = v.size() / sites();
  if (v.size() % sites() != 0 || blocks > 2) throw InvalidArgument("vector size mismatch");
  if (abs_mode) return diagonal_resolvent(v, dist_, alpha, i, blocks);
  if (dimension_ == 1) return diagonal_resolvent(v, d0_.real(), alpha, i, blocks);
  return resolvent_2d(*this, v, alpha, -i);
}

Vector DiracOperator::apply_resolvent_adjoint(const Vector& v, double alpha, bool abs_mode) const {
  const Complex i(0.0, 1.0);
  const Index blocks = v.size() / sites();
  if (v.size() % sites() != 0 || blocks > 2) throw InvalidArgument("vector size mismatch");
  if (abs_mode) return diagonal_resolvent(v, dist_, alpha, -i, blocks);
  if (dimension_ == 1) return diagonal_resolvent(v, d0_.real(), alpha, -i, blocks);
  return resolvent_2d(*this, v, alpha, i);
}

// --- restrictions and products ---------------------------------------------

Restriction make_restriction(const SiteLattice& lat, const Vec2& x, double rho, RegionShape shape) {
  if (!(rho > 0.0)) throw InvalidArgument("restriction radius must be positive");
  Restriction r{x, rho, shape, lat.sites_within(x, rho, shape)};
  if (r.kept.empty()) throw InvalidArgument("restriction keeps no sites");
  return r;
}

SparseMatrix restrict(const SparseMatrix& a, const std::vector<Index>& kept) {
  if (kept.empty()) throw InvalidArgument("restriction keeps no sites");
  std::vector<Index> map(static_cast<std::size_t>(a.rows()), -1);
  for (std::size_t k = 0; k < kept.size(); ++k) {
    if (kept[k] < 0 || kept[k] >= a.rows()) throw InvalidArgument("restriction index out of range");
    if (k > 0 && kept[k] <= kept[k - 1]) throw InvalidArgument("restriction indices must be sorted and unique");
    map[static_cast<std::size_t>(kept[k])] = static_cast<Index>(k);
  }
  std::vector<Triplet> t;
  for (Index kc = 0; kc < static_cast<Index>(kept.size()); ++kc) {
    for (SparseMatrix::InnerIterator it(a, kept[static_cast<std::size_t>(kc)]); it; ++it) {
      const Index r = map[static_cast<std::size_t>(it.row())];
      if (r >= 0) t.emplace_back(r, kc, it.value());
    }
  }
  const Index n = static_cast<Index>(kept.size());
  SparseMatrix out(n, n);
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

HermitianOperator restrict(const HermitianOperator& a, const Restriction& r) {
  return HermitianOperator(restrict(a.matrix(), r.kept));
}

SparseMatrix doubled(const SparseMatrix& a) {
  const Index n = a.rows();
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(2 * a.nonZeros()));
  for (Index c = 0; c < a.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(a, c); it; ++it) {
      t.emplace_back(it.row(), it.col(), it.value());
      t.emplace_back(n + it.row(), n + it.col(), it.value());
    }
  }
  SparseMatrix out(2 * n, 2 * a.cols());
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

SparseMatrix commutator_block(const SparseMatrix& a, const DiracOperator& d) {
  if (a.rows() != d.sites() || a.cols() != d.sites()) throw InvalidArgument("operator and Dirac sizes differ");
  const Vector& d0 = d.d0();
  std::vector<Triplet> t;
  for (Index c = 0; c < a.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(a, c); it; ++it) {
      const Complex v = (d0(it.row()) - d0(it.col())) * it.value();
      if (v != Complex(0.0, 0.0)) t.emplace_back(it.row(), it.col(), v);
    }
  }
  SparseMatrix out(a.rows(), a.cols());
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

SparseMatrix commutator_with_dirac(const SparseMatrix& a, const DiracOperator& d) {
  if (d.dimension() == 1) return commutator_block(a, d);
  if (a.rows() != d.sites() || a.cols() != d.sites()) throw InvalidArgument("operator and Dirac sizes differ");
  const Index n = d.sites();
  const Vector& d0 = d.d0();
  std::vector<Triplet> t;
  for (Index c = 0; c < a.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(a, c); it; ++it) {
      const Index m = it.row(), k = it.col();
      const Complex up = (std::conj(d0(m)) - std::conj(d0(k))) * it.value();
      const Complex lo = (d0(m) - d0(k)) * it.value();
      if (up != Complex(0.0, 0.0)) t.emplace_back(m, n + k, up);
      if (lo != Complex(0.0, 0.0)) t.emplace_back(n + m, k, lo);
    }
  }
  SparseMatrix out(2 * n, 2 * n);
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

double damped_norm(const SparseMatrix& a, const DiracOperator& d, double alpha, DampingMode mode) {
  if (!(alpha >= 0.0)) throw InvalidArgument("damping parameter must be >= 0");
  const bool abs_mode = mode == DampingMode::AbsD;
  const bool plain = a.cols() == d.sites() && d.dim() != d.sites();
  if (a.cols() != d.dim() && !(plain && abs_mode)) {
    throw InvalidArgument("operator does not act on the Dirac operator's space");
  }
  // (i 1)^{-1} = -i 1 is unitary.
  if (alpha == 0.0) return linalg::norm2(a);
  const SparseMatrix adj = a.adjoint();
  return linalg::largest_singular_value(
      [&](const Vector& v) -> Vector { return a * d.apply_resolvent(v, alpha, abs_mode); },
      [&](const Vector& w) -> Vector { return d.apply_resolvent_adjoint(adj * w, alpha, abs_mode); },
      a.cols());
}

RealVector distances(const SiteLattice& lat, const Vec2& y) {
  RealVector r(lat.size());
  for (Index i = 0; i < lat.size(); ++i) r(i) = (lat.position(i) - y).norm();
  return r;
}

HermitianOperator tapered_multiplier(const SiteLattice& lat, const Vec2& x, double rho,
                                     const TaperingProfile& f) {
  if (!(rho > 0.0)) throw InvalidArgument("rho must be positive");
  const RealVector r = distances(lat, x);
  RealVector v(lat.size());
  for (Index i = 0; i < lat.size(); ++i) v(i) = f(r(i) / rho);
  return HermitianOperator::diagonal(v);
}

SparseMatrix scale_columns(const SparseMatrix& a, const RealVector& w) {
  SparseMatrix out = a;
  for (Index c = 0; c < out.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(out, c); it; ++it) it.valueRef() *= w(c);
  }
  return out;
}

SparseMatrix scale_rows(const SparseMatrix& a, const RealVector& v) {
  SparseMatrix out = a;
  for (Index c = 0; c < out.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(out, c); it; ++it) it.valueRef() *= v(it.row());
  }
  return out;
}

std::vector<Index> support(const SparseMatrix& a) {
  std::vector<char> hit(static_cast<std::size_t>(std::max(a.rows(), a.cols())), 0);
  for (Index c = 0; c < a.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(a, c); it; ++it) {
      if (it.value() == Complex(0.0, 0.0)) continue;
      hit[static_cast<std::size_t>(it.row())] = 1;
      hit[static_cast<std::size_t>(c)] = 1;
    }
  }
  std::vector<Index> out;
  for (std::size_t i = 0; i < hit.size(); ++i) {
    if (hit[i]) out.push_back(static_cast<Index>(i));
  }
  return out;
}

}  // namespace sloc
