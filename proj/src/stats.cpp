#include "qmem/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qmem {

namespace {

void require_complete(const StatisticsFamily& fam, const char* who) {
  auto missing = fam.missing_patterns();
  if (!missing.empty()) {
    std::string list;
    for (auto m : missing) {
      if (!list.empty()) list += ", ";
      list += ProbeSchedule(fam.n_times(), m).bitstring();
    }
    throw IncompleteFamilyError(std::string(who) + ": family is missing patterns " + list,
                                std::move(missing));
  }
}

std::uint32_t mask_of(const std::vector<int>& times) {
  std::uint32_t m = 0;
  for (int t : times) m |= 1u << t;
  return m;
}

std::vector<TimedOutcome> zip_history(const std::vector<int>& times, const std::vector<int>& xs,
                                      std::size_t count) {
  std::vector<TimedOutcome> h;
  for (std::size_t k = 0; k < count; ++k) h.emplace_back(times[k], xs[k]);
  return h;
}

// Running min/max of a conditional over the cases that feed one comparison.
template <typename Tag>
struct Extremes {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  Tag lo_tag{};
  Tag hi_tag{};
  bool seen = false;

  void add(double v, const Tag& tag) {
    if (!seen || v < lo) {
      lo = v;
      lo_tag = tag;
    }
    if (!seen || v > hi) {
      hi = v;
      hi_tag = tag;
    }
    seen = true;
  }
  double spread() const { return seen ? hi - lo : 0.0; }
};

}  // namespace

double conditional(const JointDistribution& dist, int target_time, int x_target,
                   const std::vector<TimedOutcome>& history, double eps_zero) {
  const auto& measured = dist.measured_times();
  auto in_pattern = [&](int t) {
    return std::find(measured.begin(), measured.end(), t) != measured.end();
  };
  if (!in_pattern(target_time)) {
    throw std::invalid_argument("conditional: target time t" + std::to_string(target_time + 1) +
                                " not measured in pattern " + dist.pattern().bitstring());
  }
  std::uint32_t hist_mask = 0;
  for (const auto& [t, x] : history) {
    if (!in_pattern(t)) {
      throw std::invalid_argument("conditional: history time t" + std::to_string(t + 1) +
                                  " not measured in pattern " + dist.pattern().bitstring());
    }
    if (t >= target_time) {
      throw std::invalid_argument("conditional: history time t" + std::to_string(t + 1) +
                                  " does not precede target t" + std::to_string(target_time + 1));
    }
    hist_mask |= 1u << t;
  }
  const JointDistribution joint = dist.marginal(hist_mask | (1u << target_time));
  // Assemble outcome tuples in ascending time order.
  std::vector<TimedOutcome> events = history;
  std::sort(events.begin(), events.end());
  std::vector<int> xs;
  for (const auto& e : events) xs.push_back(e.second);
  double p_hist = 0.0;
  double p_joint = 0.0;
  std::vector<int> full = xs;
  full.push_back(0);
  for (int x = 0; x < dist.outcome_dim(); ++x) {
    full.back() = x;
    const double p = joint(full);
    p_hist += p;
    if (x == x_target) p_joint = p;
  }
  if (p_hist < eps_zero) return 0.0;
  return p_joint / p_hist;
}

PatternMarkovResult markov_violation(const JointDistribution& dist,
                                     std::vector<SkippedComparison>* skipped) {
  PatternMarkovResult result;
  result.pattern = dist.pattern().mask();
  const auto& measured = dist.measured_times();
  const int d = dist.outcome_dim();
  struct Tag {
    std::vector<int> history;
  };
  for (std::size_t p = 2; p < measured.size(); ++p) {
    const std::vector<int> prefix(measured.begin(), measured.begin() + static_cast<long>(p) + 1);
    const JointDistribution marg = dist.marginal(mask_of(prefix));
    const Index n_hist = marg.size() / d;
    // keyed by (latest outcome, target outcome)
    std::vector<Extremes<Tag>> groups(static_cast<std::size_t>(d * d));
    for (Index h = 0; h < n_hist; ++h) {
      const double p_hist = marg.probs().segment(h * d, d).sum();
      std::vector<int> xs = marg.outcomes_of(h * d);
      xs.pop_back();
      if (p_hist < kZeroProbability) {
        if (skipped) {
          skipped->push_back({"markov", result.pattern, prefix.back(),
                              zip_history(prefix, xs, p)});
        }
        continue;
      }
      const int latest = xs.back();
      for (int x = 0; x < d; ++x) {
        groups[static_cast<std::size_t>(latest * d + x)].add(marg.probs()(h * d + x) / p_hist,
                                                             Tag{xs});
      }
    }
    for (int key = 0; key < d * d; ++key) {
      const auto& g = groups[static_cast<std::size_t>(key)];
      if (g.spread() > result.worst) {
        result.worst = g.spread();
        MarkovViolation v;
        v.pattern = result.pattern;
        v.target_time = prefix.back();
        v.x_target = key % d;
        v.history_a = zip_history(prefix, g.hi_tag.history, p);
        v.history_b = zip_history(prefix, g.lo_tag.history, p);
        v.conditional_a = g.hi;
        v.conditional_b = g.lo;
        result.site = std::move(v);
      }
    }
  }
  return result;
}

namespace {

void fold(MarkovCheck& check, PatternMarkovResult r) {
  if (r.worst > check.worst) {
    check.worst = r.worst;
    check.site = r.site;
  }
  check.per_pattern.push_back(std::move(r));
}

}  // namespace

MarkovCheck is_markovian_full(const StatisticsFamily& fam, double tol) {
  if (!fam.contains(fam.full_mask())) {
    throw IncompleteFamilyError("is_markovian_full: family has no full pattern",
                                {fam.full_mask()});
  }
  MarkovCheck check;
  fold(check, markov_violation(fam.full(), &check.skipped));
  check.ok = check.worst <= tol;
  return check;
}

MarkovCheck is_markovian_sub(const StatisticsFamily& fam, double tol) {
  require_complete(fam, "is_markovian_sub");
  MarkovCheck check;
  for (const auto& [mask, dist] : fam.entries()) {
    fold(check, markov_violation(dist, &check.skipped));
  }
  check.ok = check.worst <= tol;
  return check;
}

CompatibilityCheck is_compatible(const StatisticsFamily& fam, double tol) {
  require_complete(fam, "is_compatible");
  CompatibilityCheck check;
  const int n = fam.n_times();
  const int d = fam.outcome_dim();
  for (int j = 1; j < n; ++j) {
    for (int i = 0; i < j; ++i) {
      // Patterns measuring t_i and t_j, nothing strictly between, nothing after.
      const std::uint32_t pair = (1u << i) | (1u << j);
      const std::uint32_t between = ((1u << j) - 1u) & ~((1u << (i + 1)) - 1u);
      const std::uint32_t after = fam.full_mask() & ~((1u << (j + 1)) - 1u);
      std::vector<Extremes<std::uint32_t>> groups(static_cast<std::size_t>(d * d));
      for (const auto& [mask, dist] : fam.entries()) {
        if ((mask & pair) != pair || (mask & (between | after)) != 0u) continue;
        const JointDistribution marg = dist.marginal(pair);
        for (int xi = 0; xi < d; ++xi) {
          const double p_i = marg.probs().segment(xi * d, d).sum();
          if (p_i < kZeroProbability) {
            check.skipped.push_back({"compatibility", mask, j, {{i, xi}}});
            continue;
          }
          for (int xj = 0; xj < d; ++xj) {
            groups[static_cast<std::size_t>(xi * d + xj)].add(marg.probs()(xi * d + xj) / p_i,
                                                              mask);
          }
        }
      }
      for (int key = 0; key < d * d; ++key) {
        const auto& g = groups[static_cast<std::size_t>(key)];
        if (g.spread() > check.worst) {
          check.worst = g.spread();
          check.site = CompatibilityViolation{i, j, key / d, key % d, g.hi_tag, g.lo_tag, g.hi, g.lo};
        }
      }
    }
  }
  check.ok = check.worst <= tol;
  return check;
}

ConsistencyCheck kolmogorov_consistent(const StatisticsFamily& fam, double tol) {
  require_complete(fam, "kolmogorov_consistent");
  ConsistencyCheck check;
  const JointDistribution& full = fam.full();
  for (const auto& [mask, dist] : fam.entries()) {
    const double diff = (full.marginal(mask).probs() - dist.probs()).cwiseAbs().maxCoeff();
    if (diff > check.worst) {
      check.worst = diff;
      check.worst_pattern = mask;
    }
  }
  check.ok = check.worst <= tol;
  return check;
}

AnalysisReport witness_hidden_memory(const StatisticsFamily& fam, double tol) {
  require_complete(fam, "witness_hidden_memory");
  AnalysisReport report;
  report.n_times = fam.n_times();
  report.tol = tol;
  report.markov_full = is_markovian_full(fam, tol);
  report.markov_sub = is_markovian_sub(fam, tol);
  report.compatible = is_compatible(fam, tol);
  report.kolmogorov = kolmogorov_consistent(fam, tol);
  if (!report.markov_full.ok) {
    report.verdict = Verdict::kNonMarkovian;
  } else if (!report.markov_sub.ok) {
    report.verdict = Verdict::kHiddenMemoryNonMarkovianSub;
  } else if (!report.compatible.ok) {
    report.verdict = Verdict::kHiddenMemoryIncompatible;
  } else {
    report.verdict = Verdict::kConsistentWithMemoryless;
  }
  return report;
}

bool witnesses_hidden_memory(Verdict v) {
  return v == Verdict::kHiddenMemoryNonMarkovianSub || v == Verdict::kHiddenMemoryIncompatible;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kConsistentWithMemoryless:
      return "CONSISTENT_WITH_MEMORYLESS";
    case Verdict::kNonMarkovian:
      return "NON_MARKOVIAN";
    case Verdict::kHiddenMemoryNonMarkovianSub:
      return "HIDDEN_MEMORY_NONMARKOVIAN_SUB";
    case Verdict::kHiddenMemoryIncompatible:
      return "HIDDEN_MEMORY_INCOMPATIBLE";
  }
  return "UNKNOWN";
}

Verdict verdict_from_string(const std::string& s) {
  for (Verdict v : {Verdict::kConsistentWithMemoryless, Verdict::kNonMarkovian,
                    Verdict::kHiddenMemoryNonMarkovianSub, Verdict::kHiddenMemoryIncompatible}) {
    if (to_string(v) == s) return v;
  }
  throw std::invalid_argument("unknown verdict '" + s + "'");
}

}  // namespace qmem
