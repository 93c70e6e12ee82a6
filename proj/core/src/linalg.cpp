#include "sloc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace sloc::linalg {

namespace {

constexpr Index kSvdDenseThreshold = 512;

lapack_int to_lapack(Index n) { return static_cast<lapack_int>(n); }

void require_square(const DenseMatrix& a) {
  if (a.rows() != a.cols()) throw InvalidArgument("matrix must be square");
}

Vector start_vector(Index n) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) {
    const double x = static_cast<double>(i);
    v(i) = Complex(1.0 + 0.5 * std::cos(0.37 * x + 0.2), 0.3 * std::sin(0.11 * x + 1.0));
  }
  return v / v.norm();
}

// Replacement start vector after a Lanczos breakdown.
Vector fresh_vector(Index n, int salt) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) {
    const double x = static_cast<double>(i + 1) * (1.0 + 0.618 * salt);
    v(i) = Complex(std::sin(12.9898 * x), std::cos(78.233 * x));
  }
  return v / v.norm();
}

// Two passes of classical Gram-Schmidt against the first m columns of V.
void orthogonalize(Vector& w, const DenseMatrix& V, Index m) {
  if (m == 0) return;
  for (int pass = 0; pass < 2; ++pass) {
    const Vector h = V.leftCols(m).adjoint() * w;
    w.noalias() -= V.leftCols(m) * h;
  }
}

// Lanczos process for a Hermitian operator, grown on demand.
class Lanczos {
 public:
  Lanczos(LinearMap op, Index n) : op_(std::move(op)), n_(n) {}

  Index size() const { return m_; }

  void extend(Index m_target) {
    m_target = std::min(m_target, n_);
    if (V_.cols() < m_target + 1) V_.conservativeResize(n_, std::min(m_target + 1, n_ + 1));
    if (m_ == 0) V_.col(0) = start_vector(n_);
    while (m_ < m_target) {
      Vector w = op_(V_.col(m_));
      const double a = V_.col(m_).dot(w).real();
      orthogonalize(w, V_, m_ + 1);
      alpha_.push_back(a);
      double b = w.norm();
      ++m_;
      if (m_ == n_) {
        beta_.push_back(0.0);
        break;
      }
      if (b <= 1e-13 * std::max(1.0, std::abs(a))) {
        // Invariant subspace found; continue in its orthogonal complement.
        w = fresh_vector(n_, static_cast<int>(m_));
        orthogonalize(w, V_, m_);
        b = 0.0;
        w /= w.norm();
        beta_.push_back(b);
        V_.col(m_) = w;
      } else {
        beta_.push_back(b);
        V_.col(m_) = w / b;
      }
    }
  }

  struct Ritz {
    RealVector theta;
    Eigen::MatrixXd s;
    RealVector residual;
  };

  Ritz ritz() const {
    const Index m = m_;
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (Index i = 0; i < m; ++i) {
      T(i, i) = alpha_[static_cast<std::size_t>(i)];
      if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta_[static_cast<std::size_t>(i)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    Ritz r{es.eigenvalues(), es.eigenvectors(), RealVector(m)};
    const double b_last = beta_.empty() ? 0.0 : beta_.back();
    for (Index i = 0; i < m; ++i) r.residual(i) = std::abs(b_last * r.s(m - 1, i));
    return r;
  }

  Vector ritz_vector(const Eigen::VectorXd& s) const {
    return V_.leftCols(m_) * s.cast<Complex>();
  }

 private:
  LinearMap op_;
  Index n_;
  Index m_ = 0;
  DenseMatrix V_;
  std::vector<double> alpha_, beta_;
};

NearestEigen dense_nearest(const DenseMatrix& a, double sigma, int k, bool vectors) {
  NearestEigen out;
  std::vector<Index> order(static_cast<std::size_t>(a.rows()));
  std::iota(order.begin(), order.end(), Index{0});
  RealVector vals;
  DenseMatrix vecs;
  if (vectors) {
    auto ed = eigh(a);
    vals = ed.values;
    vecs = std::move(ed.vectors);
  } else {
    vals = eigvalsh(a);
  }
  std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) {
    return std::abs(vals(i) - sigma) < std::abs(vals(j) - sigma);
  });
  const Index kk = std::min<Index>(k, a.rows());
  out.values.resize(kk);
  if (vectors) out.vectors.resize(a.rows(), kk);
  for (Index i = 0; i < kk; ++i) {
    out.values(i) = vals(order[static_cast<std::size_t>(i)]);
    if (vectors) out.vectors.col(i) = vecs.col(order[static_cast<std::size_t>(i)]);
  }
  return out;
}

}  // namespace

RealVector eigvalsh(const DenseMatrix& a) {
  require_square(a);
  const Index n = a.rows();
  RealVector w(n);
  if (n == 0) return w;
  DenseMatrix work = a;
  const lapack_int info =
      LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'L', to_lapack(n), work.data(), to_lapack(n), w.data());
  if (info != 0) throw ConvergenceError("zheevd failed", static_cast<double>(info));
  return w;
}

EigenDecomposition eigh(const DenseMatrix& a) {
  require_square(a);
  const Index n = a.rows();
  EigenDecomposition out{RealVector(n), a};
  if (n == 0) return out;
  const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', to_lapack(n),
                                         out.vectors.data(), to_lapack(n), out.values.data());
  if (info != 0) throw ConvergenceError("zheevd failed", static_cast<double>(info));
  return out;
}

Inertia inertia(const DenseMatrix& a, double shift, double zero_tol) {
  require_square(a);
  const Index n = a.rows();
  Inertia out;
  if (n == 0) return out;
  DenseMatrix f = a;
  if (shift != 0.0) f.diagonal().array() -= shift;
  std::vector<lapack_int> ipiv(static_cast<std::size_t>(n));
  const lapack_int info =
      LAPACKE_zhetrf(LAPACK_COL_MAJOR, 'L', to_lapack(n), f.data(), to_lapack(n), ipiv.data());
  if (info < 0) throw InvalidArgument("zhetrf: illegal argument");
  auto count = [&](double d) {
    if (std::abs(d) <= zero_tol) {
      ++out.zero;
    } else if (d > 0.0) {
      ++out.positive;
    } else {
      ++out.negative;
    }
  };
  for (Index k = 0; k < n;) {
    if (ipiv[static_cast<std::size_t>(k)] > 0) {
      count(f(k, k).real());
      k += 1;
    } else {
      // 2x2 Hermitian pivot block [[p, conj(q)], [q, r]].
      const double p = f(k, k).real();
      const double r = f(k + 1, k + 1).real();
      const double q = std::abs(f(k + 1, k));
      const double mean = 0.5 * (p + r);
      const double rad = std::hypot(0.5 * (p - r), q);
      count(mean + rad);
      count(mean - rad);
      k += 2;
    }
  }
  return out;
}

double norm2(const DenseMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::BDCSVD<DenseMatrix> svd(a);
  return svd.singularValues()(0);
}

NearestEigen nearest_eigenpairs(const SparseMatrix& a, double sigma, int k,
                                const LanczosOptions& opts) {
  const Index n = a.rows();
  if (n != a.cols()) throw InvalidArgument("matrix must be square");
  if (k < 1) throw InvalidArgument("k must be positive");
  if (n <= dense_threshold || k >= n) return dense_nearest(DenseMatrix(a), sigma, k, opts.vectors);

  SparseMatrix id(n, n);
  id.setIdentity();
  const double scale = std::max(norm_inf(a), 1e-300);
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  double shift = sigma;
  bool ok = false;
  for (int attempt = 0; attempt < 4 && !ok; ++attempt) {
    if (attempt > 0) shift = sigma + scale * 1e-9 * std::pow(10.0, attempt);
    SparseMatrix shifted = a - shift * id;
    shifted.makeCompressed();
    lu.compute(shifted);
    ok = lu.info() == Eigen::Success;
  }
  if (!ok) return dense_nearest(DenseMatrix(a), sigma, k, opts.vectors);

  Lanczos lz([&](const Vector& v) -> Vector { return lu.solve(v); }, n);
  Index m = std::min<Index>(n, std::max<Index>(2 * k + 30, 60));
  for (int restart = 0; restart <= opts.max_restarts; ++restart) {
    lz.extend(m);
    const auto r = lz.ritz();
    const Index mm = lz.size();
    std::vector<Index> order(static_cast<std::size_t>(mm));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index i, Index j) { return std::abs(r.theta(i)) > std::abs(r.theta(j)); });
    const Index kk = std::min<Index>(k, mm);
    bool converged = true;
    double worst = 0.0;
    for (Index i = 0; i < kk; ++i) {
      const Index j = order[static_cast<std::size_t>(i)];
      const double rel = r.residual(j) / std::max(std::abs(r.theta(j)), 1e-300);
      worst = std::max(worst, rel);
      if (rel > opts.tol) converged = false;
    }
    if (converged || mm == n) {
      NearestEigen out;
      out.iterations = static_cast<int>(mm);
      out.values.resize(kk);
      if (opts.vectors) out.vectors.resize(n, kk);
      for (Index i = 0; i < kk; ++i) {
        const Index j = order[static_cast<std::size_t>(i)];
        out.values(i) = shift + 1.0 / r.theta(j);
        if (opts.vectors) {
          Vector v = lz.ritz_vector(r.s.col(j));
          out.vectors.col(i) = v / v.norm();
        }
      }
      return out;
    }
    if (restart == opts.max_restarts) {
      throw ConvergenceError("shift-invert Lanczos did not converge", worst);
    }
    m = std::min<Index>(n, 2 * m);
  }
  throw ConvergenceError("shift-invert Lanczos did not converge", 1.0);
}

double smallest_abs_eigenvalue(const SparseMatrix& a, double tol) {
  LanczosOptions opts;
  opts.tol = tol;
  return std::abs(nearest_eigenpairs(a, 0.0, 1, opts).values(0));
}

double smallest_eigenvalue_psd(const SparseMatrix& a, double tol) {
  const Index n = a.rows();
  if (n <= dense_threshold) return eigvalsh(DenseMatrix(a))(0);
  const double scale = std::max(norm_inf(a), 1e-300);
  const double sigma = -1e-8 * scale;
  SparseMatrix id(n, n);
  id.setIdentity();
  SparseMatrix shifted = a - sigma * id;
  shifted.makeCompressed();
  // Positive definite after the shift, so a Cholesky-type factorization works.
  Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower> ldlt(shifted);
  if (ldlt.info() != Eigen::Success) {
    LanczosOptions opts;
    opts.tol = tol;
    return nearest_eigenpairs(a, sigma, 1, opts).values(0);
  }
  Lanczos lz([&](const Vector& v) -> Vector { return ldlt.solve(v); }, n);
  Index m = std::min<Index>(n, 60);
  double worst = 0.0;
  for (int restart = 0; restart <= 6; ++restart) {
    lz.extend(m);
    const auto r = lz.ritz();
    Index j = 0;
    for (Index i = 1; i < lz.size(); ++i) {
      if (r.theta(i) > r.theta(j)) j = i;
    }
    worst = r.residual(j) / std::max(std::abs(r.theta(j)), 1e-300);
    if (worst <= tol || lz.size() == n) return sigma + 1.0 / r.theta(j);
    m = std::min<Index>(n, 2 * m);
  }
  throw ConvergenceError("smallest eigenvalue solve did not converge", worst);
}

double largest_singular_value(const LinearMap& a, const LinearMap& a_adj, Index n,
                              double rel_tol, int max_iter) {
  if (n == 0) return 0.0;
  if (n <= kSvdDenseThreshold) {
    Vector e = Vector::Zero(n);
    e(0) = 1.0;
    const Vector first = a(e);
    DenseMatrix dense(first.size(), n);
    dense.col(0) = first;
    for (Index j = 1; j < n; ++j) {
      e.setZero();
      e(j) = 1.0;
      dense.col(j) = a(e);
    }
    return norm2(dense);
  }
  Lanczos lz([&](const Vector& v) -> Vector { return a_adj(a(v)); }, n);
  Index m = 20;
  double worst = 0.0;
  while (true) {
    lz.extend(std::min<Index>(m, n));
    const auto r = lz.ritz();
    const Index top = lz.size() - 1;  // eigenvalues ascending
    const double theta = r.theta(top);
    if (theta <= 0.0) return 0.0;
    worst = r.residual(top) / theta;
    if (worst <= rel_tol || lz.size() == n) return std::sqrt(theta);
    if (lz.size() >= max_iter) throw ConvergenceError("largest singular value did not converge", worst);
    m += 20;
  }
}

double norm2(const SparseMatrix& a) {
  if (a.nonZeros() == 0) return 0.0;
  const SparseMatrix adj = a.adjoint();
  return largest_singular_value([&](const Vector& v) -> Vector { return a * v; },
                                [&](const Vector& v) -> Vector { return adj * v; }, a.cols());
}

double norm_inf(const SparseMatrix& a) {
  RealVector rows = RealVector::Zero(a.rows());
  for (Index c = 0; c < a.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(a, c); it; ++it) rows(it.row()) += std::abs(it.value());
  }
  return a.rows() == 0 ? 0.0 : rows.maxCoeff();
}

}  // namespace sloc::linalg
