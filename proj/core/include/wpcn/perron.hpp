#pragma once

// Dense linear-algebra helpers built around the Perron-Frobenius theory of
// non-negative matrices: spectral radius, Perron vector, Collatz-Wielandt
// bracketing, plus the two complex routines the beamformers need (top
// Hermitian eigenpair and orthonormal null-space bases).

#include <Eigen/Dense>

#include <optional>

namespace wpcn {

using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Square real matrix with finite, non-negative entries.
class NonNegMatrix {
 public:
  /// Throws DomainError on a negative or non-finite entry, a non-square
  /// shape, or an empty matrix.
  explicit NonNegMatrix(RealMatrix entries);

  const RealMatrix& entries() const noexcept { return entries_; }
  Eigen::Index size() const noexcept { return entries_.rows(); }

 private:
  RealMatrix entries_;
};

struct EigenPair {
  double value = 0.0;
  RealVector vector;  // scaled so that the last component equals 1
};

struct PerronOptions {
  double tol = 1e-10;
  int max_iter = 10000;
  // Positive start vector for the power iteration; all-ones when empty.
  std::optional<RealVector> start;
};

/// Lower/upper Collatz-Wielandt ratios min_j (Av)_j/v_j and max_j (Av)_j/v_j.
struct RatioBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Spectral radius via power iteration, certified by the Collatz-Wielandt
/// bracket of the iterate. Matrices on which the iteration stalls (reducible
/// or periodic structure) are handed to a dense eigensolver.
/// Throws IterationLimitError if max_iter is exhausted first.
double spectral_radius(const NonNegMatrix& m, double tol = 1e-8, int max_iter = 10000);

/// Perron root and eigenvector, the vector scaled so its last entry is 1.
/// Throws DegenerateError when the last entry vanishes (< 1e-14 relative).
EigenPair dominant_eigenvector(const NonNegMatrix& m, const PerronOptions& opts = {});
inline EigenPair dominant_eigenvector(const NonNegMatrix& m, double tol) {
  PerronOptions opts;
  opts.tol = tol;
  return dominant_eigenvector(m, opts);
}

/// Requires v > 0 componentwise.
RatioBounds collatz_wielandt_bounds(const NonNegMatrix& m, const RealVector& v);

/// True iff both Collatz-Wielandt ratios of v coincide with rho within 1e-6
/// (relative to rho). False for non-positive v.
bool collatz_wielandt_check(const NonNegMatrix& m, double rho, const RealVector& v);

struct HermitianEigenPair {
  double value = 0.0;
  ComplexVector vector;  // unit norm
};

/// Largest eigenvalue of a Hermitian matrix and a unit eigenvector.
/// Throws DomainError when h is not Hermitian within 1e-12 (relative to its
/// largest entry).
HermitianEigenPair hermitian_top_eigenpair(const ComplexMatrix& h);

/// Orthonormal basis (M x (M-r)) of the null space of a full-row-rank r x M
/// matrix. Throws RankError (with the detected rank) when a singular value
/// falls below 1e-10 of the largest one.
ComplexMatrix nullspace_basis(const ComplexMatrix& a);

}  // namespace wpcn
