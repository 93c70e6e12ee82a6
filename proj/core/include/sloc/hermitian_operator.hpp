#pragma once

#include <vector>

#include "sloc/types.hpp"

namespace sloc {

/// Sparse complex Hermitian matrix. Construction checks Hermiticity exactly,
/// so every instance satisfies A(i,j) == conj(A(j,i)) bit for bit.
class HermitianOperator {
 public:
  HermitianOperator() = default;
  explicit HermitianOperator(SparseMatrix m);

  /// Builds from entries with row <= col; the lower triangle is mirrored.
  /// Repeated entries are summed. Diagonal imaginary parts are rejected.
  static HermitianOperator from_upper(Index dim, const std::vector<Triplet>& upper);
  static HermitianOperator diagonal(const RealVector& d);
  static HermitianOperator identity(Index dim, double scale = 1.0);

  Index dim() const { return m_.rows(); }
  const SparseMatrix& matrix() const { return m_; }
  DenseMatrix dense() const { return DenseMatrix(m_); }

  /// Largest |A(i,j) - conj(A(j,i))|.
  static double max_asymmetry(const SparseMatrix& m);

  HermitianOperator operator+(const HermitianOperator& other) const;
  HermitianOperator operator-(const HermitianOperator& other) const;
  HermitianOperator scaled(double s) const;
  HermitianOperator shifted(double e) const;  ///< A - e*1

  bool operator==(const HermitianOperator& other) const;

 private:
  SparseMatrix m_;
};

}  // namespace sloc
