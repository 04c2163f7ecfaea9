#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace wpcn {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside the mathematical domain of an operation (negative entry,
/// tau outside (0,1), non-Hermitian matrix, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An iterative method hit its iteration cap before meeting its tolerance.
class IterationLimitError : public Error {
 public:
  IterationLimitError(const std::string& what, int iterations)
      : Error(what), iterations_(iterations) {}
  int iterations() const noexcept { return iterations_; }

 private:
  int iterations_;
};

/// Iteration-limit error that carries the best iterate seen so far.
template <class T>
class NotConvergedError : public IterationLimitError {
 public:
  NotConvergedError(const std::string& what, int iterations, T best)
      : IterationLimitError(what, iterations), best_(std::move(best)) {}
  const T& best() const noexcept { return best_; }

 private:
  T best_;
};

class RankError : public Error {
 public:
  RankError(const std::string& what, int detected_rank)
      : Error(what), rank_(detected_rank) {}
  int detected_rank() const noexcept { return rank_; }

 private:
  int rank_;
};

/// Zero receiver gain, zero power budget, or a Perron vector whose
/// normalizing component vanishes.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// A requested target cannot be met by any feasible point.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// Operation not available for the given dimensions (e.g. ZF with K > M).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

}  // namespace wpcn
