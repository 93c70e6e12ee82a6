#pragma once

#include <functional>

#include "sloc/types.hpp"

namespace sloc::linalg {

/// Problems at or below this dimension go straight to dense LAPACK.
inline constexpr Index dense_threshold = 512;

/// Eigenvalues of a Hermitian matrix in ascending order (LAPACK zheevd).
RealVector eigvalsh(const DenseMatrix& a);

struct EigenDecomposition {
  RealVector values;    ///< ascending
  DenseMatrix vectors;  ///< columns
};
EigenDecomposition eigh(const DenseMatrix& a);

struct Inertia {
  Index positive = 0;
  Index negative = 0;
  Index zero = 0;
};

/// Sylvester inertia of (a - shift*1) read off a Bunch-Kaufman LDL^H
/// factorization (LAPACK zhetrf). Pivots with |d| <= zero_tol count as zero.
Inertia inertia(const DenseMatrix& a, double shift = 0.0, double zero_tol = 0.0);

/// Largest singular value of a dense matrix.
double norm2(const DenseMatrix& a);

struct NearestEigen {
  RealVector values;    ///< sorted by distance to the shift
  DenseMatrix vectors;  ///< empty unless requested
  int iterations = 0;
};

struct LanczosOptions {
  double tol = 1e-12;      ///< relative residual of the shift-inverted Ritz pairs
  int max_restarts = 6;    ///< Krylov space doubles on every restart
  bool vectors = false;
};

/// The k eigenvalues of a Hermitian sparse matrix closest to sigma, by
/// shift-invert Lanczos with full reorthogonalisation. Small problems (or
/// ones where the shifted matrix cannot be factorized) use dense LAPACK.
NearestEigen nearest_eigenpairs(const SparseMatrix& a, double sigma, int k,
                                const LanczosOptions& opts = {});

/// min |eigenvalue| of a Hermitian sparse matrix.
double smallest_abs_eigenvalue(const SparseMatrix& a, double tol = 1e-12);

/// Smallest eigenvalue of a positive semidefinite Hermitian sparse matrix.
double smallest_eigenvalue_psd(const SparseMatrix& a, double tol = 1e-12);

using LinearMap = std::function<Vector(const Vector&)>;

/// Largest singular value of the map A (n columns, adjoint A_adj) by Lanczos
/// on A^H A from a fixed start vector. Throws ConvergenceError after max_iter.
double largest_singular_value(const LinearMap& a, const LinearMap& a_adj, Index n,
                              double rel_tol = 1e-10, int max_iter = 600);

/// Spectral norm of a sparse matrix (dense SVD below dense_threshold).
double norm2(const SparseMatrix& a);

/// Max absolute row sum; cheap upper bound for the spectral norm.
double norm_inf(const SparseMatrix& a);

}  // namespace sloc::linalg
