#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qmem/numerics.hpp"

namespace qmem {

/// Hard cap on the number of probe times (2^n patterns, d^n outcomes each).
inline constexpr int kMaxTimes = 12;

/// Which of the times t_1..t_n are probed. Bit j (0-based) set means the
/// system is measured at t_{j+1}; unset times get the do-nothing instrument.
class ProbeSchedule {
 public:
  ProbeSchedule(int n_times, std::uint32_t mask);

  /// Parse a bitstring such as "1011" (t_1 leftmost).
  static ProbeSchedule from_bitstring(std::string_view bits);
  static ProbeSchedule full(int n_times);

  int n_times() const { return n_times_; }
  std::uint32_t mask() const { return mask_; }
  bool measures(int time) const { return (mask_ >> time) & 1u; }
  /// 0-based indices of measured times, ascending.
  std::vector<int> measured_times() const;
  int count() const;
  std::string bitstring() const;

  friend bool operator==(const ProbeSchedule&, const ProbeSchedule&) = default;

 private:
  int n_times_;
  std::uint32_t mask_;
};

/// Joint outcome distribution for one probing pattern.
///
/// Outcome tuples are flattened lexicographically with the outcome at the
/// earliest measured time as the slowest index: for measured times
/// m_0 < m_1 < ... < m_{k-1} the flat index is sum_i x_{m_i} d^{k-1-i}.
/// The empty pattern has a single entry.
class JointDistribution {
 public:
  JointDistribution(ProbeSchedule pattern, int outcome_dim, RealVector probs);
  /// All-zero distribution of the right size for `pattern`.
  static JointDistribution zeros(ProbeSchedule pattern, int outcome_dim);

  const ProbeSchedule& pattern() const { return pattern_; }
  int n_times() const { return pattern_.n_times(); }
  int outcome_dim() const { return outcome_dim_; }
  const std::vector<int>& measured_times() const { return measured_; }
  const RealVector& probs() const { return probs_; }
  RealVector& probs() { return probs_; }
  Index size() const { return probs_.size(); }

  /// Flat index of an outcome tuple given in measured-time order.
  Index index_of(std::span<const int> outcomes) const;
  /// Inverse of index_of.
  std::vector<int> outcomes_of(Index flat) const;

  double operator()(std::span<const int> outcomes) const { return probs_(index_of(outcomes)); }

  /// Sum out every measured time not in `keep_mask` (which must be a subset
  /// of this pattern). The result is a distribution on the kept times.
  JointDistribution marginal(std::uint32_t keep_mask) const;

  double total() const { return probs_.sum(); }

 private:
  ProbeSchedule pattern_;
  int outcome_dim_;
  std::vector<int> measured_;
  RealVector probs_;
};

/// Distributions for a collection of probing patterns of one process.
class StatisticsFamily {
 public:
  StatisticsFamily(int n_times, int outcome_dim);

  int n_times() const { return n_times_; }
  int outcome_dim() const { return outcome_dim_; }
  std::uint32_t full_mask() const { return (1u << n_times_) - 1u; }

  /// Insert or replace the entry for dist.pattern().
  void insert(JointDistribution dist);
  bool contains(std::uint32_t mask) const { return table_.count(mask) != 0; }
  const JointDistribution& at(std::uint32_t mask) const;
  const JointDistribution& full() const { return at(full_mask()); }

  bool is_complete() const { return missing_patterns().empty(); }
  std::vector<std::uint32_t> missing_patterns() const;

  /// Entries in ascending mask order.
  const std::map<std::uint32_t, JointDistribution>& entries() const { return table_; }

 private:
  int n_times_;
  int outcome_dim_;
  std::map<std::uint32_t, JointDistribution> table_;
};

/// Raised by analyzers that need patterns the family does not contain.
class IncompleteFamilyError : public std::runtime_error {
 public:
  IncompleteFamilyError(const std::string& what, std::vector<std::uint32_t> missing)
      : std::runtime_error(what), missing_(std::move(missing)) {}
  const std::vector<std::uint32_t>& missing() const { return missing_; }

 private:
  std::vector<std::uint32_t> missing_;
};

/// Max-abs difference between two families over the patterns both contain.
double max_abs_diff(const StatisticsFamily& a, const StatisticsFamily& b);

}  // namespace qmem
