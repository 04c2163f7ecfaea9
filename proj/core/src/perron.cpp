#include "wpcn/perron.hpp"

#include "wpcn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace wpcn {
namespace {

// The bracket must halve at least once every kStallWindow iterations,
// otherwise the iteration is treated as stalled.
constexpr int kStallWindow = 50;

struct PowerResult {
  double rho = 0.0;
  RealVector vector;  // non-negative, max-normalized
};

double max_abs(const RealVector& v) { return v.cwiseAbs().maxCoeff(); }

PowerResult dense_perron(const RealMatrix& a) {
  Eigen::EigenSolver<RealMatrix> es(a, true);
  if (es.info() != Eigen::Success) {
    throw Error("dense eigensolver failed");
  }
  const auto& values = es.eigenvalues();
  double rho = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    rho = std::max(rho, std::abs(values[i]));
  }
  // Among eigenvalues on the spectral circle pick the real, non-negative one
  // whose eigenvector is closest to sign-definite.
  Eigen::Index best = -1;
  double best_score = -1.0;
  const double slack = 1e-9 * std::max(rho, 1e-300);
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (std::abs(values[i] - std::complex<double>(rho, 0.0)) > slack) continue;
    RealVector v = es.eigenvectors().col(i).real();
    if (v.sum() < 0) v = -v;
    const double score = v.cwiseMax(0.0).sum() / std::max(v.cwiseAbs().sum(), 1e-300);
    if (score > best_score) {
      best_score = score;
      best = i;
    }
  }
  PowerResult out;
  out.rho = rho;
  if (best < 0) {
    // rho == 0 with a complex-rounded spectrum; fall back to the largest-modulus vector.
    Eigen::Index imax = 0;
    values.cwiseAbs().maxCoeff(&imax);
    best = imax;
  }
  RealVector v = es.eigenvectors().col(best).real();
  if (v.sum() < 0) v = -v;
  v = v.cwiseMax(0.0);
  const double scale = max_abs(v);
  out.vector = scale > 0 ? RealVector(v / scale) : RealVector::Ones(a.rows());
  return out;
}

PowerResult power_iteration(const RealMatrix& a, double tol, int max_iter,
                            const std::optional<RealVector>& start) {
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  const Eigen::Index n = a.rows();
  RealVector x = start ? *start : RealVector::Ones(n);
  if (x.size() != n || (x.array() <= 0.0).any() || !x.allFinite()) {
    throw DomainError("power iteration start vector must be positive with matching size");
  }
  x /= max_abs(x);

  double width_ref = std::numeric_limits<double>::infinity();
  int window_start = 0;
  for (int it = 1; it <= max_iter; ++it) {
    RealVector y = a * x;
    if (y.maxCoeff() <= 0.0) {
      return {0.0, x};  // nilpotent direction: A x = 0 with x > 0 means rho = 0
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    bool positive = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!(x[i] > 0.0)) {
        positive = false;
        break;
      }
      const double r = y[i] / x[i];
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    if (!positive) return dense_perron(a);
    if (hi - lo <= tol * hi) {
      return {0.5 * (lo + hi), x};
    }
    const double width = hi - lo;
    if (width <= 0.5 * width_ref) {
      width_ref = width;
      window_start = it;
    } else if (it - window_start >= kStallWindow) {
      return dense_perron(a);
    }
    x = y / y.maxCoeff();
  }
  throw IterationLimitError(
      "power iteration did not converge in " + std::to_string(max_iter) + " iterations",
      max_iter);
}

}  // namespace

NonNegMatrix::NonNegMatrix(RealMatrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() < 1 || entries_.rows() != entries_.cols()) {
    throw DomainError("non-negative matrix must be square and non-empty");
  }
  if (!entries_.allFinite()) throw DomainError("non-negative matrix has a non-finite entry");
  if ((entries_.array() < 0.0).any()) {
    throw DomainError("non-negative matrix has a negative entry");
  }
}

double spectral_radius(const NonNegMatrix& m, double tol, int max_iter) {
  return power_iteration(m.entries(), tol, max_iter, std::nullopt).rho;
}

EigenPair dominant_eigenvector(const NonNegMatrix& m, const PerronOptions& opts) {
  PowerResult r = power_iteration(m.entries(), opts.tol, opts.max_iter, opts.start);
  const Eigen::Index n = m.size();
  const double last = r.vector[n - 1];
  if (!(last >= 1e-14 * max_abs(r.vector))) {
    throw DegenerateError("dominant eigenvector has a vanishing last component");
  }
  return {r.rho, r.vector / last};
}

RatioBounds collatz_wielandt_bounds(const NonNegMatrix& m, const RealVector& v) {
  if (v.size() != m.size() || (v.array() <= 0.0).any()) {
    throw DomainError("Collatz-Wielandt bounds need a positive vector of matching size");
  }
  const RealVector ratios = (m.entries() * v).cwiseQuotient(v);
  return {ratios.minCoeff(), ratios.maxCoeff()};
}

bool collatz_wielandt_check(const NonNegMatrix& m, double rho, const RealVector& v) {
  if (v.size() != m.size() || !(v.array() > 0.0).all()) return false;
  const RatioBounds b = collatz_wielandt_bounds(m, v);
  const double scale = std::max(std::abs(rho), std::numeric_limits<double>::min());
  constexpr double kTol = 1e-6;
  return std::abs(b.lower - rho) <= kTol * scale && std::abs(b.upper - rho) <= kTol * scale;
}

HermitianEigenPair hermitian_top_eigenpair(const ComplexMatrix& h) {
  if (h.rows() < 1 || h.rows() != h.cols()) throw DomainError("matrix must be square");
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw DomainError("matrix is not Hermitian");
  }
  const ComplexMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sym);
  if (es.info() != Eigen::Success) throw Error("Hermitian eigensolver failed");
  const Eigen::Index top = sym.rows() - 1;
  return {es.eigenvalues()[top], es.eigenvectors().col(top)};
}

ComplexMatrix nullspace_basis(const ComplexMatrix& a) {
  const Eigen::Index r = a.rows();
  const Eigen::Index m = a.cols();
  if (m < 1) throw DomainError("null space of a matrix without columns");
  if (r >= m) throw DomainError("null space basis needs fewer rows than columns");
  if (r == 0) return ComplexMatrix::Identity(m, m);

  Eigen::JacobiSVD<ComplexMatrix> svd(a, Eigen::ComputeFullV);
  const RealVector& s = svd.singularValues();
  const double threshold = 1e-10 * std::max(s[0], std::numeric_limits<double>::min());
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] > threshold) ++rank;
  }
  if (rank < r) {
    throw RankError("matrix is rank deficient (rank " + std::to_string(rank) + " < " +
                        std::to_string(r) + ")",
                    rank);
  }
  return svd.matrixV().rightCols(m - r);
}

}  // namespace wpcn
