#pragma once

#include <vector>

#include "sloc/hermitian_operator.hpp"
#include "sloc/lattice.hpp"
#include "sloc/tapering_profile.hpp"
#include "sloc/types.hpp"

namespace sloc {

/// Dirac operator D(x) = sum_j gamma_j (X_j - x_j) with gamma_1 = sigma_x and
/// gamma_2 = sigma_y. In two dimensions D acts on the doubled space with the
/// site basis repeated in two blocks: D = [[0, D0^*], [D0, 0]] and
/// D0 = (X1 - x1) + i (X2 - x2). In one dimension D = X - x on the plain space.
class DiracOperator {
 public:
  /// Positions of all lattice sites, or only of `sites` when given.
  DiracOperator(const SiteLattice& lat, const Vec2& center);
  DiracOperator(const SiteLattice& lat, const Vec2& center, const std::vector<Index>& sites);

  int dimension() const { return dimension_; }
  Vec2 center() const { return center_; }
  Index sites() const { return d0_.size(); }
  /// Dimension of the space D acts on: 2*sites in 2D, sites in 1D.
  Index dim() const { return dimension_ == 2 ? 2 * sites() : sites(); }

  /// Diagonal of D0 (in 1D, the real displacement X - x).
  const Vector& d0() const { return d0_; }
  /// |X - x| per site.
  const RealVector& distance() const { return dist_; }

  SparseMatrix matrix() const;
  Vector apply(const Vector& v) const;

  /// (i + alpha D)^{-1} v, or (i + alpha |D|)^{-1} v when abs_mode is set.
  Vector apply_resolvent(const Vector& v, double alpha, bool abs_mode = false) const;
  /// Adjoint of apply_resolvent.
  Vector apply_resolvent_adjoint(const Vector& v, double alpha, bool abs_mode = false) const;

 private:
  int dimension_;
  Vec2 center_;
  Vector d0_;
  RealVector dist_;
};

enum class DampingMode { D, AbsD };

/// Kept sites of a region, sorted and duplicate-free.
struct Restriction {
  Vec2 center = Vec2::Zero();
  double radius = 0.0;
  RegionShape shape = RegionShape::Ball;
  std::vector<Index> kept;
};

Restriction make_restriction(const SiteLattice& lat, const Vec2& x, double rho,
                             RegionShape shape = RegionShape::Ball);

/// Principal submatrix on r.kept.
HermitianOperator restrict(const HermitianOperator& a, const Restriction& r);
SparseMatrix restrict(const SparseMatrix& a, const std::vector<Index>& kept);

/// blockdiag(A, A), the lift of a site operator to the doubled space.
SparseMatrix doubled(const SparseMatrix& a);

/// [D(x), A (x) 1_2] in 2D (blocks [D0^*, A] top right, [D0, A] bottom left);
/// [X - x, A] in 1D. The result is anti-Hermitian for Hermitian A.
SparseMatrix commutator_with_dirac(const SparseMatrix& a, const DiracOperator& d);
inline SparseMatrix commutator_with_dirac(const HermitianOperator& h, const DiracOperator& d) {
  return commutator_with_dirac(h.matrix(), d);
}

/// The single block [X1 + i X2, A] in 2D, [X, A] in 1D.
SparseMatrix commutator_block(const SparseMatrix& a, const DiracOperator& d);

/// || A (i + alpha D)^{-1} ||, or with |D| for DampingMode::AbsD. A must act
/// on the same space as D (doubled in 2D) unless it is a plain site operator
/// and the mode is AbsD, where the resolvent is applied per site.
double damped_norm(const SparseMatrix& a, const DiracOperator& d, double alpha,
                   DampingMode mode = DampingMode::D);

/// Diagonal F(|p - x| / rho) per site.
HermitianOperator tapered_multiplier(const SiteLattice& lat, const Vec2& x, double rho,
                                     const TaperingProfile& f);

/// Diagonal |X - y| per site.
RealVector distances(const SiteLattice& lat, const Vec2& y);

/// Columns of `a` scaled by w (A diag(w)), rows by v (diag(v) A).
SparseMatrix scale_columns(const SparseMatrix& a, const RealVector& w);
SparseMatrix scale_rows(const SparseMatrix& a, const RealVector& v);

/// Sites touched by a nonzero entry of a.
std::vector<Index> support(const SparseMatrix& a);

}  // namespace sloc
