#include "sloc/localgap.hpp"

#include <cmath>
#include <numbers>

#include "sloc/linalg.hpp"
#include "sloc/parallel.hpp"

namespace sloc {

SparseMatrix restricted_square(const HermitianOperator& H, const std::vector<Index>& kept,
                               double energy) {
  if (kept.empty()) throw InvalidArgument("restriction keeps no sites");
  const SparseMatrix& h = H.matrix();
  // C = (H - E) P^T keeps the columns of the region; the restricted square is C^H C.
  std::vector<Triplet> t;
  for (std::size_t k = 0; k < kept.size(); ++k) {
    const Index col = kept[k];
    bool has_diag = false;
    for (SparseMatrix::InnerIterator it(h, col); it; ++it) {
      Complex v = it.value();
      if (it.row() == col) {
        v -= energy;
        has_diag = true;
      }
      t.emplace_back(it.row(), static_cast<Index>(k), v);
    }
    if (!has_diag && energy != 0.0) t.emplace_back(col, static_cast<Index>(k), Complex(-energy, 0.0));
  }
  SparseMatrix c(h.rows(), static_cast<Index>(kept.size()));
  c.setFromTriplets(t.begin(), t.end());
  SparseMatrix sq = SparseMatrix(c.adjoint()) * c;
  // Symmetrize away rounding so downstream solvers see an exactly Hermitian matrix.
  sq = 0.5 * (sq + SparseMatrix(sq.adjoint()));
  return sq;
}

LocalGapResult local_gap(const HermitianOperator& H, const SiteLattice& lat, const Vec2& x,
                         double rho, double energy, RegionShape shape) {
  if (H.dim() != lat.size()) throw InvalidArgument("operator and lattice sizes differ");
  const Restriction r = make_restriction(lat, x, rho, shape);
  const SparseMatrix sq = restricted_square(H, r.kept, energy);
  const double lam = linalg::smallest_eigenvalue_psd(sq);
  LocalGapResult out;
  out.rho = rho;
  out.x = x;
  out.energy = energy;
  out.min_eig_restricted_square = std::max(lam, 0.0);
  out.g_rho = std::sqrt(out.min_eig_restricted_square);
  out.kept_sites = static_cast<Index>(r.kept.size());
  return out;
}

std::vector<LocalGapResult> local_gap_profile(const HermitianOperator& H, const SiteLattice& lat,
                                              const std::vector<Vec2>& path, double rho,
                                              double energy, int threads) {
  if (path.empty()) throw InvalidArgument("empty path");
  std::vector<LocalGapResult> out(path.size());
  parallel_for(path.size(), threads,
               [&](std::size_t i) { out[i] = local_gap(H, lat, path[i], rho, energy); });
  return out;
}

double distance_to_region(const Vec2& y, const Vec2& x, double rho, RegionShape shape) {
  if (shape == RegionShape::Ball) return std::max(0.0, (y - x).norm() - rho);
  const Vec2 excess = ((y - x).cwiseAbs().array() - 0.5 * rho).cwiseMax(0.0).matrix();
  return excess.norm();
}

double weyl_bound_rhs(const HermitianOperator& H, const HermitianOperator& W,
                      const SiteLattice& lat, const Vec2& x, double rho, const Vec2& y,
                      RegionShape shape) {
  const double dist = distance_to_region(y, x, rho, shape);
  if (!(dist > 0.0)) throw InvalidArgument("y must lie outside the closed region");
  if (W.matrix().nonZeros() == 0) return 0.0;
  const RealVector weight = (1.0 + distances(lat, y).array()).matrix();
  const double wy = linalg::norm2(scale_rows(W.matrix(), weight));
  return wy * (2.0 * linalg::norm2(H.matrix()) + linalg::norm2(W.matrix())) / dist;
}

double dos_window(const RealVector& eigenvalues, Index n_sites, double energy, double sigma) {
  if (!(sigma > 0.0)) throw InvalidArgument("sigma must be positive");
  if (n_sites <= 0) throw InvalidArgument("n_sites must be positive");
  const double norm = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));
  double sum = 0.0;
  for (Index n = 0; n < eigenvalues.size(); ++n) {
    const double z = (eigenvalues(n) - energy) / sigma;
    sum += std::exp(-0.5 * z * z);
  }
  return norm * sum / static_cast<double>(n_sites);
}

double dos_window(const HermitianOperator& H, double energy, double sigma) {
  return dos_window(linalg::eigvalsh(H.dense()), H.dim(), energy, sigma);
}

RealVector ldos_window(const HermitianOperator& H, double energy, double sigma) {
  if (!(sigma > 0.0)) throw InvalidArgument("sigma must be positive");
  const auto ed = linalg::eigh(H.dense());
  const double norm = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));
  RealVector w(ed.values.size());
  for (Index n = 0; n < w.size(); ++n) {
    const double z = (ed.values(n) - energy) / sigma;
    w(n) = norm * std::exp(-0.5 * z * z);
  }
  return ed.vectors.cwiseAbs2() * w;
}

}  // namespace sloc
