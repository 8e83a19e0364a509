#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qmem/statistics.hpp"

namespace qmem {

/// Conditioning events with probability below this are treated as impossible:
/// the conditional is defined as 0 and the comparison is skipped.
inline constexpr double kZeroProbability = 1e-12;

/// (time, outcome) pair, 0-based time.
using TimedOutcome = std::pair<int, int>;

/// P(x_target | history) from `dist`, marginalizing every other measured time.
/// Returns 0 when P(history) < eps_zero.
double conditional(const JointDistribution& dist, int target_time, int x_target,
                   const std::vector<TimedOutcome>& history,
                   double eps_zero = kZeroProbability);

/// A comparison that was not made because its conditioning event is
/// (numerically) impossible.
struct SkippedComparison {
  std::string check;  // "markov" or "compatibility"
  std::uint32_t pattern;
  int target_time;
  std::vector<TimedOutcome> history;
};

/// Two full-history conditionals of the same target outcome that share the
/// latest conditioning outcome but disagree.
struct MarkovViolation {
  std::uint32_t pattern = 0;
  int target_time = 0;
  int x_target = 0;
  std::vector<TimedOutcome> history_a;
  std::vector<TimedOutcome> history_b;
  double conditional_a = 0.0;
  double conditional_b = 0.0;
};

struct PatternMarkovResult {
  std::uint32_t pattern = 0;
  double worst = 0.0;
  std::optional<MarkovViolation> site;
};

/// Markovianity of one or more patterns. The violation magnitude is the
/// largest spread |P(x_j | h) - P(x_j | h')| over pairs of possible histories
/// h, h' that agree on the most recent outcome; zero exactly when every
/// full-history conditional equals the one-step conditional.
struct MarkovCheck {
  bool ok = true;
  double worst = 0.0;
  std::optional<MarkovViolation> site;
  std::vector<PatternMarkovResult> per_pattern;  // ascending mask order
  std::vector<SkippedComparison> skipped;
};

struct CompatibilityViolation {
  int earlier_time = 0;  // t_i
  int later_time = 0;    // t_j
  int x_earlier = 0;
  int x_later = 0;
  std::uint32_t pattern_a = 0;
  std::uint32_t pattern_b = 0;
  double conditional_a = 0.0;
  double conditional_b = 0.0;
};

struct CompatibilityCheck {
  bool ok = true;
  double worst = 0.0;
  std::optional<CompatibilityViolation> site;
  std::vector<SkippedComparison> skipped;
};

struct ConsistencyCheck {
  bool ok = true;
  double worst = 0.0;
  std::optional<std::uint32_t> worst_pattern;
};

enum class Verdict {
  kConsistentWithMemoryless,
  kNonMarkovian,
  kHiddenMemoryNonMarkovianSub,
  kHiddenMemoryIncompatible,
};

std::string to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

struct AnalysisReport {
  int n_times = 0;
  double tol = kStatsTol;
  MarkovCheck markov_full;
  MarkovCheck markov_sub;
  CompatibilityCheck compatible;
  ConsistencyCheck kolmogorov;
  Verdict verdict = Verdict::kConsistentWithMemoryless;
};

/// Markovianity of the full pattern (all times measured).
MarkovCheck is_markovian_full(const StatisticsFamily& fam, double tol = kStatsTol);
/// Markovianity of every pattern in a complete family.
MarkovCheck is_markovian_sub(const StatisticsFamily& fam, double tol = kStatsTol);
/// Markovianity of a single distribution.
PatternMarkovResult markov_violation(const JointDistribution& dist,
                                     std::vector<SkippedComparison>* skipped = nullptr);

/// Agreement of P(x_j | x_i) across all patterns whose latest measured time
/// before t_j is t_i and which measure nothing after t_j.
CompatibilityCheck is_compatible(const StatisticsFamily& fam, double tol = kStatsTol);

/// Every pattern's distribution equals the corresponding marginal of the full
/// pattern.
ConsistencyCheck kolmogorov_consistent(const StatisticsFamily& fam, double tol = kStatsTol);

/// Runs all checks and applies the decision table:
/// non-Markovian full statistics -> kNonMarkovian; otherwise non-Markovian
/// sub-statistics -> kHiddenMemoryNonMarkovianSub; otherwise incompatible ->
/// kHiddenMemoryIncompatible; otherwise kConsistentWithMemoryless (no witness
/// fired, which does not establish that a memoryless model exists).
AnalysisReport witness_hidden_memory(const StatisticsFamily& fam, double tol = kStatsTol);

/// True for the two verdicts that rule out every memoryless quantum model.
bool witnesses_hidden_memory(Verdict v);

}  // namespace qmem
