#pragma once

#include <span>
#include <variant>
#include <vector>

#include "qmem/stats.hpp"

namespace qmem {

/// Column-stochastic matrix: entry (to, from) is the probability of moving
/// from outcome `from` to outcome `to`. Entries nonnegative, columns sum to 1.
class StochasticMatrix {
 public:
  explicit StochasticMatrix(RealMatrix entries, double tol = kNumericTol);

  static StochasticMatrix identity(Index d);
  static StochasticMatrix uniform(Index d);

  Index dim() const { return m_.rows(); }
  const RealMatrix& entries() const { return m_; }
  double operator()(Index to, Index from) const { return m_(to, from); }

 private:
  RealMatrix m_;
};

/// Initial probability vector plus one stochastic matrix per interval.
class ClassicalMemorylessModel {
 public:
  ClassicalMemorylessModel(RealVector p1, std::vector<StochasticMatrix> steps,
                           double tol = kNumericTol);

  int n_times() const { return static_cast<int>(steps_.size()) + 1; }
  Index dim() const { return p1_.size(); }
  const RealVector& p1() const { return p1_; }
  const std::vector<StochasticMatrix>& steps() const { return steps_; }

 private:
  RealVector p1_;
  std::vector<StochasticMatrix> steps_;
};

/// P(x_n, ..., x_1) = <x_n|S_n|x_{n-1}> ... <x_2|S_2|x_1> <x_1|p1>.
/// Outcomes are given in time order x_1..x_n.
double classical_predict(const ClassicalMemorylessModel& model, std::span<const int> outcomes);

/// Full-pattern distribution from classical_predict; every other pattern is
/// its marginal.
StatisticsFamily classical_family(const ClassicalMemorylessModel& model);

/// Columns of a fitted step whose source outcome was never observed.
struct UnreachableColumn {
  int step;    // 0-based interval index
  int source;  // outcome at the earlier time
};

struct ClassicalFit {
  ClassicalMemorylessModel model;
  /// These columns were set to the uniform distribution.
  std::vector<UnreachableColumn> unreachable;
};

/// Rebuild a memoryless model from a Markovian full-pattern distribution
/// using the observed one-step conditionals. A non-Markovian input is
/// returned as its violation instead.
std::variant<ClassicalFit, MarkovViolation> fit_classical(const JointDistribution& full_dist,
                                                          double tol = kStatsTol);

}  // namespace qmem
