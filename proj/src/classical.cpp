#include "qmem/classical.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qmem {

StochasticMatrix::StochasticMatrix(RealMatrix entries, double tol) : m_(std::move(entries)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0) {
    throw DimensionError("StochasticMatrix: must be square and non-empty, got " +
                         shape_string(m_));
  }
  if (!m_.array().isFinite().all()) throw std::invalid_argument("StochasticMatrix: non-finite");
  if (m_.minCoeff() < 0.0) throw std::invalid_argument("StochasticMatrix: negative entry");
  for (Index c = 0; c < m_.cols(); ++c) {
    if (std::abs(m_.col(c).sum() - 1.0) > tol) {
      throw std::invalid_argument("StochasticMatrix: column " + std::to_string(c) +
                                  " does not sum to 1");
    }
  }
}

StochasticMatrix StochasticMatrix::identity(Index d) {
  return StochasticMatrix(RealMatrix::Identity(d, d));
}

StochasticMatrix StochasticMatrix::uniform(Index d) {
  return StochasticMatrix(RealMatrix::Constant(d, d, 1.0 / static_cast<double>(d)));
}

ClassicalMemorylessModel::ClassicalMemorylessModel(RealVector p1,
                                                   std::vector<StochasticMatrix> steps,
                                                   double tol)
    : p1_(std::move(p1)), steps_(std::move(steps)) {
  if (p1_.size() == 0) throw std::invalid_argument("ClassicalMemorylessModel: empty p1");
  if (!p1_.array().isFinite().all() || p1_.minCoeff() < 0.0 ||
      std::abs(p1_.sum() - 1.0) > tol) {
    throw std::invalid_argument("ClassicalMemorylessModel: p1 is not a probability vector");
  }
  for (const auto& s : steps_) {
    if (s.dim() != p1_.size()) {
      throw DimensionError("ClassicalMemorylessModel: step dimension " +
                           std::to_string(s.dim()) + " differs from " +
                           std::to_string(p1_.size()));
    }
  }
  if (n_times() > kMaxTimes) {
    throw std::invalid_argument("ClassicalMemorylessModel: too many times");
  }
}

double classical_predict(const ClassicalMemorylessModel& model, std::span<const int> outcomes) {
  if (static_cast<int>(outcomes.size()) != model.n_times()) {
    throw DimensionError("classical_predict: expected " + std::to_string(model.n_times()) +
                         " outcomes, got " + std::to_string(outcomes.size()));
  }
  for (int x : outcomes) {
    if (x < 0 || x >= model.dim()) {
      throw std::out_of_range("classical_predict: outcome " + std::to_string(x) +
                              " out of range");
    }
  }
  double p = model.p1()(outcomes[0]);
  for (std::size_t j = 1; j < outcomes.size(); ++j) {
    p *= model.steps()[j - 1](outcomes[j], outcomes[j - 1]);
  }
  return p;
}

StatisticsFamily classical_family(const ClassicalMemorylessModel& model) {
  const int n = model.n_times();
  const int d = static_cast<int>(model.dim());
  StatisticsFamily fam(n, d);
  JointDistribution full = JointDistribution::zeros(ProbeSchedule::full(n), d);
  for (Index flat = 0; flat < full.size(); ++flat) {
    full.probs()(flat) = classical_predict(model, full.outcomes_of(flat));
  }
  for (std::uint32_t mask = 0; mask < fam.full_mask(); ++mask) fam.insert(full.marginal(mask));
  fam.insert(std::move(full));
  return fam;
}

std::variant<ClassicalFit, MarkovViolation> fit_classical(const JointDistribution& full_dist,
                                                          double tol) {
  const int n = full_dist.n_times();
  if (full_dist.pattern().mask() != ProbeSchedule::full(n).mask()) {
    throw std::invalid_argument("fit_classical: distribution for pattern " +
                                full_dist.pattern().bitstring() + " does not cover all times");
  }
  PatternMarkovResult markov = markov_violation(full_dist);
  if (markov.worst > tol) return *markov.site;

  const int d = full_dist.outcome_dim();
  RealVector p1 = full_dist.marginal(1u).probs().cwiseMax(0.0);
  p1 /= p1.sum();
  std::vector<StochasticMatrix> steps;
  std::vector<UnreachableColumn> unreachable;
  for (int j = 1; j < n; ++j) {
    // pair marginal indexed x_{j-1} * d + x_j
    const JointDistribution pair = full_dist.marginal((1u << (j - 1)) | (1u << j));
    RealMatrix s(d, d);
    for (int from = 0; from < d; ++from) {
      const double p_from = pair.probs().segment(from * d, d).sum();
      if (p_from < kZeroProbability) {
        s.col(from).setConstant(1.0 / d);
        unreachable.push_back({j - 1, from});
        continue;
      }
      for (int to = 0; to < d; ++to) s(to, from) = std::max(0.0, pair.probs()(from * d + to));
      s.col(from) /= s.col(from).sum();
    }
    steps.emplace_back(std::move(s));
  }
  return ClassicalFit{ClassicalMemorylessModel(std::move(p1), std::move(steps)),
                      std::move(unreachable)};
}

}  // namespace qmem
