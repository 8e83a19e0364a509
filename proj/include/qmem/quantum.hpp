#pragma once

#include <functional>
#include <vector>

#include "qmem/numerics.hpp"
#include "qmem/statistics.hpp"

namespace qmem {

/// Normalized density operator: Hermitian, positive semidefinite, unit trace
/// (each within kValidationTol). Sub-normalized branch states are carried
/// around as plain ComplexMatrix.
class DensityOperator {
 public:
  explicit DensityOperator(ComplexMatrix m, double tol = kValidationTol);

  static DensityOperator maximally_mixed(Index d);
  static DensityOperator pure(const ComplexVector& psi);

  Index dim() const { return m_.rows(); }
  const ComplexMatrix& matrix() const { return m_; }

 private:
  ComplexMatrix m_;
};

/// Completely positive trace-preserving map in Kraus form,
/// rho -> sum_l K_l rho K_l^dagger with sum_l K_l^dagger K_l = I.
class KrausChannel {
 public:
  explicit KrausChannel(std::vector<ComplexMatrix> kraus_ops, double tol = kValidationTol);

  static KrausChannel identity(Index d);
  static KrausChannel unitary(const ComplexMatrix& u);
  /// Discard the system and reprepare |fresh>, tensored with identity on an
  /// environment of dimension d_env: Kraus set {|fresh><i| (x) I_E}.
  static KrausChannel discard_and_reprepare(Index d_sys, Index d_env, Index fresh = 0);

  Index dim_in() const { return ops_.front().cols(); }
  Index dim_out() const { return ops_.front().rows(); }
  const std::vector<ComplexMatrix>& kraus_ops() const { return ops_; }

  /// Superoperator acting on column-major vec(rho): sum_l conj(K_l) (x) K_l.
  ComplexMatrix superoperator() const;

 private:
  std::vector<ComplexMatrix> ops_;
};

/// `second` after `first`, as the pairwise product Kraus set {B_k A_l}.
KrausChannel compose(const KrausChannel& first, const KrausChannel& second);
/// ch (x) id_{d_env}: ch acts on the system (left) factor.
KrausChannel on_system(const KrausChannel& ch, Index d_env);
/// id_{d_sys} (x) ch: ch acts on the environment (right) factor.
KrausChannel on_environment(const KrausChannel& ch, Index d_sys);

/// Apply a channel to a (possibly sub-normalized) state.
ComplexMatrix apply_channel(const KrausChannel& ch, const ComplexMatrix& state);

/// Rank-1 projector |x><x| in the computational basis.
struct Projector {
  Index dim;
  Index outcome_index;

  Projector(Index d, Index x);
  ComplexMatrix matrix() const { return gates::projector(dim, outcome_index); }
};

struct MeasuredState {
  ComplexMatrix state;  // (P_x (x) I_E) rho (P_x (x) I_E), unnormalized
  double probability;   // its trace
};

/// Sharp measurement of the system factor of a joint state, outcome x.
MeasuredState measure_system(const ComplexMatrix& joint, Index d_sys, Index d_env, Index x);

/// System (x) environment circuit probed on the system at n_times times.
/// steps[j] acts on the joint space between t_{j+1} and t_{j+2}.
class DilatedProcess {
 public:
  DilatedProcess(Index d_sys, Index d_env, DensityOperator initial_state,
                 std::vector<KrausChannel> steps);

  Index d_sys() const { return d_sys_; }
  Index d_env() const { return d_env_; }
  Index joint_dim() const { return d_sys_ * d_env_; }
  int n_times() const { return static_cast<int>(steps_.size()) + 1; }
  const DensityOperator& initial_state() const { return initial_; }
  const std::vector<KrausChannel>& steps() const { return steps_; }

 private:
  Index d_sys_;
  Index d_env_;
  DensityOperator initial_;
  std::vector<KrausChannel> steps_;
};

/// Snapshot handed to a probe observer: the unnormalized joint state right
/// before the probe at `time`, along with the outcomes recorded so far.
struct ProbeEvent {
  int time;                           // 0-based
  std::vector<int> earlier_outcomes;  // outcomes at earlier measured times, ascending
  const ComplexMatrix& state;
};
using ProbeObserver = std::function<void(const ProbeEvent&)>;

/// Joint distribution of outcomes at the measured times of `sched`, obtained
/// by re-running the circuit with the do-nothing instrument at the remaining
/// times. Branches are carried unnormalized and traced at the end.
JointDistribution run_schedule(const DilatedProcess& proc, const ProbeSchedule& sched,
                               const ProbeObserver& observer = {});

/// run_schedule for every one of the 2^n patterns.
StatisticsFamily all_pattern_statistics(const DilatedProcess& proc);

}  // namespace qmem
