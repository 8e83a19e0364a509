#include "qmem/statistics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace qmem {

ProbeSchedule::ProbeSchedule(int n_times, std::uint32_t mask) : n_times_(n_times), mask_(mask) {
  if (n_times < 0 || n_times > kMaxTimes) {
    throw std::invalid_argument("ProbeSchedule: n_times " + std::to_string(n_times) +
                                " outside [0, " + std::to_string(kMaxTimes) + "]");
  }
  if ((mask >> n_times) != 0u) {
    throw std::invalid_argument("ProbeSchedule: mask has bits beyond n_times");
  }
}

ProbeSchedule ProbeSchedule::from_bitstring(std::string_view bits) {
  if (bits.size() > static_cast<std::size_t>(kMaxTimes)) {
    throw std::invalid_argument("ProbeSchedule: bitstring longer than " +
                                std::to_string(kMaxTimes));
  }
  std::uint32_t mask = 0;
  for (std::size_t j = 0; j < bits.size(); ++j) {
    if (bits[j] == '1') {
      mask |= 1u << j;
    } else if (bits[j] != '0') {
      throw std::invalid_argument("ProbeSchedule: bitstring '" + std::string(bits) +
                                  "' may only contain 0 and 1");
    }
  }
  return ProbeSchedule(static_cast<int>(bits.size()), mask);
}

ProbeSchedule ProbeSchedule::full(int n_times) {
  return ProbeSchedule(n_times, (1u << n_times) - 1u);
}

std::vector<int> ProbeSchedule::measured_times() const {
  std::vector<int> out;
  for (int j = 0; j < n_times_; ++j) {
    if (measures(j)) out.push_back(j);
  }
  return out;
}

int ProbeSchedule::count() const { return std::popcount(mask_); }

std::string ProbeSchedule::bitstring() const {
  std::string s(static_cast<std::size_t>(n_times_), '0');
  for (int j = 0; j < n_times_; ++j) {
    if (measures(j)) s[static_cast<std::size_t>(j)] = '1';
  }
  return s;
}

namespace {

Index ipow(int base, int exp) {
  Index r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

}  // namespace

JointDistribution::JointDistribution(ProbeSchedule pattern, int outcome_dim, RealVector probs)
    : pattern_(pattern),
      outcome_dim_(outcome_dim),
      measured_(pattern.measured_times()),
      probs_(std::move(probs)) {
  if (outcome_dim < 1) throw std::invalid_argument("JointDistribution: outcome_dim < 1");
  const Index expected = ipow(outcome_dim, static_cast<int>(measured_.size()));
  if (probs_.size() != expected) {
    throw DimensionError("JointDistribution: pattern " + pattern.bitstring() + " needs " +
                         std::to_string(expected) + " probabilities, got " +
                         std::to_string(probs_.size()));
  }
  if (!probs_.array().isFinite().all()) {
    throw std::invalid_argument("JointDistribution: non-finite probability");
  }
}

JointDistribution JointDistribution::zeros(ProbeSchedule pattern, int outcome_dim) {
  return JointDistribution(pattern, outcome_dim,
                           RealVector::Zero(ipow(outcome_dim, pattern.count())));
}

Index JointDistribution::index_of(std::span<const int> outcomes) const {
  if (outcomes.size() != measured_.size()) {
    throw DimensionError("JointDistribution::index_of: expected " +
                         std::to_string(measured_.size()) + " outcomes, got " +
                         std::to_string(outcomes.size()));
  }
  Index flat = 0;
  for (int x : outcomes) {
    if (x < 0 || x >= outcome_dim_) {
      throw std::out_of_range("JointDistribution::index_of: outcome " + std::to_string(x) +
                              " out of range");
    }
    flat = flat * outcome_dim_ + x;
  }
  return flat;
}

std::vector<int> JointDistribution::outcomes_of(Index flat) const {
  std::vector<int> out(measured_.size());
  for (std::size_t k = out.size(); k-- > 0;) {
    out[k] = static_cast<int>(flat % outcome_dim_);
    flat /= outcome_dim_;
  }
  return out;
}

JointDistribution JointDistribution::marginal(std::uint32_t keep_mask) const {
  if ((keep_mask & ~pattern_.mask()) != 0u) {
    throw std::invalid_argument("JointDistribution::marginal: keep mask is not a subset of " +
                                pattern_.bitstring());
  }
  JointDistribution out = zeros(ProbeSchedule(n_times(), keep_mask), outcome_dim_);
  std::vector<int> kept_positions;
  for (std::size_t k = 0; k < measured_.size(); ++k) {
    if ((keep_mask >> measured_[k]) & 1u) kept_positions.push_back(static_cast<int>(k));
  }
  for (Index flat = 0; flat < probs_.size(); ++flat) {
    const std::vector<int> xs = outcomes_of(flat);
    Index target = 0;
    for (int k : kept_positions) target = target * outcome_dim_ + xs[static_cast<std::size_t>(k)];
    out.probs_(target) += probs_(flat);
  }
  return out;
}

StatisticsFamily::StatisticsFamily(int n_times, int outcome_dim)
    : n_times_(n_times), outcome_dim_(outcome_dim) {
  if (n_times < 0 || n_times > kMaxTimes) {
    throw std::invalid_argument("StatisticsFamily: n_times " + std::to_string(n_times) +
                                " outside [0, " + std::to_string(kMaxTimes) + "]");
  }
  if (outcome_dim < 1) throw std::invalid_argument("StatisticsFamily: outcome_dim < 1");
}

void StatisticsFamily::insert(JointDistribution dist) {
  if (dist.n_times() != n_times_ || dist.outcome_dim() != outcome_dim_) {
    throw DimensionError("StatisticsFamily::insert: distribution for pattern " +
                         dist.pattern().bitstring() + " does not match family shape");
  }
  const std::uint32_t mask = dist.pattern().mask();
  table_.insert_or_assign(mask, std::move(dist));
}

const JointDistribution& StatisticsFamily::at(std::uint32_t mask) const {
  auto it = table_.find(mask);
  if (it == table_.end()) {
    throw IncompleteFamilyError(
        "family has no entry for pattern " + ProbeSchedule(n_times_, mask).bitstring(), {mask});
  }
  return it->second;
}

std::vector<std::uint32_t> StatisticsFamily::missing_patterns() const {
  std::vector<std::uint32_t> out;
  for (std::uint32_t m = 0; m <= full_mask(); ++m) {
    if (!contains(m)) out.push_back(m);
  }
  return out;
}

double max_abs_diff(const StatisticsFamily& a, const StatisticsFamily& b) {
  if (a.n_times() != b.n_times() || a.outcome_dim() != b.outcome_dim()) {
    return std::numeric_limits<double>::infinity();
  }
  double worst = 0.0;
  for (const auto& [mask, dist] : a.entries()) {
    if (!b.contains(mask)) continue;
    worst = std::max(worst, (dist.probs() - b.at(mask).probs()).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace qmem
