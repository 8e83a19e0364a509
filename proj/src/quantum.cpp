#include "qmem/quantum.hpp"

#include <cmath>

namespace qmem {

DensityOperator::DensityOperator(ComplexMatrix m, double tol) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0) {
    throw DimensionError("DensityOperator: matrix must be square and non-empty, got " +
                         shape_string(m_));
  }
  if (!all_finite(m_)) throw std::invalid_argument("DensityOperator: non-finite entry");
  if (!is_hermitian(m_, tol)) throw std::invalid_argument("DensityOperator: not Hermitian");
  if (std::abs(m_.trace() - Complex(1.0)) > tol) {
    throw std::invalid_argument("DensityOperator: trace is not 1");
  }
  if (min_eigenvalue(m_) < -tol) {
    throw std::invalid_argument("DensityOperator: not positive semidefinite");
  }
}

DensityOperator DensityOperator::maximally_mixed(Index d) {
  return DensityOperator(gates::identity(d) / static_cast<double>(d));
}

DensityOperator DensityOperator::pure(const ComplexVector& psi) {
  return DensityOperator(gates::ketbra(psi, psi) / psi.squaredNorm());
}

KrausChannel::KrausChannel(std::vector<ComplexMatrix> kraus_ops, double tol)
    : ops_(std::move(kraus_ops)) {
  if (ops_.empty()) throw std::invalid_argument("KrausChannel: empty Kraus set");
  const Index in = ops_.front().cols();
  const Index out = ops_.front().rows();
  ComplexMatrix sum = ComplexMatrix::Zero(in, in);
  for (const auto& k : ops_) {
    if (k.cols() != in || k.rows() != out) {
      throw DimensionError("KrausChannel: Kraus operator " + shape_string(k) +
                           " differs from " + shape_string(ops_.front()));
    }
    if (!all_finite(k)) throw std::invalid_argument("KrausChannel: non-finite entry");
    sum += k.adjoint() * k;
  }
  if (max_abs_diff(sum, gates::identity(in)) > tol) {
    throw std::invalid_argument("KrausChannel: sum K^dagger K differs from identity");
  }
}

KrausChannel KrausChannel::identity(Index d) { return KrausChannel({gates::identity(d)}); }

KrausChannel KrausChannel::unitary(const ComplexMatrix& u) { return KrausChannel({u}); }

KrausChannel KrausChannel::discard_and_reprepare(Index d_sys, Index d_env, Index fresh) {
  std::vector<ComplexMatrix> ops;
  for (Index i = 0; i < d_sys; ++i) {
    ops.push_back(kron(gates::ketbra(gates::ket(d_sys, fresh), gates::ket(d_sys, i)),
                       gates::identity(d_env)));
  }
  return KrausChannel(std::move(ops));
}

ComplexMatrix KrausChannel::superoperator() const {
  const Index n_in = dim_in() * dim_in();
  const Index n_out = dim_out() * dim_out();
  ComplexMatrix s = ComplexMatrix::Zero(n_out, n_in);
  for (const auto& k : ops_) s += kron(k.conjugate(), k);
  return s;
}

KrausChannel compose(const KrausChannel& first, const KrausChannel& second) {
  if (first.dim_out() != second.dim_in()) {
    throw DimensionError("compose: output dimension " + std::to_string(first.dim_out()) +
                         " does not match input dimension " + std::to_string(second.dim_in()));
  }
  std::vector<ComplexMatrix> ops;
  for (const auto& b : second.kraus_ops()) {
    for (const auto& a : first.kraus_ops()) {
      ComplexMatrix ba = b * a;
      if (ba.cwiseAbs().maxCoeff() > 0.0) ops.push_back(std::move(ba));
    }
  }
  return KrausChannel(std::move(ops));
}

KrausChannel on_system(const KrausChannel& ch, Index d_env) {
  std::vector<ComplexMatrix> ops;
  for (const auto& k : ch.kraus_ops()) ops.push_back(kron(k, gates::identity(d_env)));
  return KrausChannel(std::move(ops));
}

KrausChannel on_environment(const KrausChannel& ch, Index d_sys) {
  std::vector<ComplexMatrix> ops;
  for (const auto& k : ch.kraus_ops()) ops.push_back(kron(gates::identity(d_sys), k));
  return KrausChannel(std::move(ops));
}

ComplexMatrix apply_channel(const KrausChannel& ch, const ComplexMatrix& state) {
  if (state.rows() != ch.dim_in() || state.cols() != ch.dim_in()) {
    throw DimensionError("apply_channel: state " + shape_string(state) +
                         " does not match channel input dimension " +
                         std::to_string(ch.dim_in()));
  }
  ComplexMatrix out = ComplexMatrix::Zero(ch.dim_out(), ch.dim_out());
  for (const auto& k : ch.kraus_ops()) out.noalias() += k * state * k.adjoint();
  return out;
}

Projector::Projector(Index d, Index x) : dim(d), outcome_index(x) {
  if (x < 0 || x >= d) {
    throw std::out_of_range("Projector: outcome " + std::to_string(x) + " outside [0, " +
                            std::to_string(d) + ")");
  }
}

MeasuredState measure_system(const ComplexMatrix& joint, Index d_sys, Index d_env, Index x) {
  if (x < 0 || x >= d_sys) {
    throw std::out_of_range("measure_system: outcome " + std::to_string(x) + " outside [0, " +
                            std::to_string(d_sys) + ")");
  }
  if (joint.rows() != d_sys * d_env || joint.cols() != joint.rows()) {
    throw DimensionError("measure_system: state " + shape_string(joint) + " is not " +
                         std::to_string(d_sys) + "x" + std::to_string(d_env) + " joint");
  }
  // (P_x (x) I) rho (P_x (x) I) keeps only the block with system index x.
  ComplexMatrix out = ComplexMatrix::Zero(joint.rows(), joint.cols());
  out.block(x * d_env, x * d_env, d_env, d_env) = joint.block(x * d_env, x * d_env, d_env, d_env);
  const double p = out.trace().real();
  return {std::move(out), p};
}

DilatedProcess::DilatedProcess(Index d_sys, Index d_env, DensityOperator initial_state,
                               std::vector<KrausChannel> steps)
    : d_sys_(d_sys), d_env_(d_env), initial_(std::move(initial_state)), steps_(std::move(steps)) {
  if (d_sys < 1 || d_env < 1) throw std::invalid_argument("DilatedProcess: dimensions < 1");
  const Index d = d_sys * d_env;
  if (initial_.dim() != d) {
    throw DimensionError("DilatedProcess: initial state has dimension " +
                         std::to_string(initial_.dim()) + ", expected " + std::to_string(d));
  }
  if (n_times() > kMaxTimes) {
    throw std::invalid_argument("DilatedProcess: " + std::to_string(n_times()) +
                                " probe times exceeds cap of " + std::to_string(kMaxTimes));
  }
  for (std::size_t j = 0; j < steps_.size(); ++j) {
    if (steps_[j].dim_in() != d || steps_[j].dim_out() != d) {
      throw DimensionError("DilatedProcess: step " + std::to_string(j) +
                           " does not act on the joint space of dimension " + std::to_string(d));
    }
  }
}

namespace {

struct ScheduleRunner {
  const DilatedProcess& proc;
  const ProbeSchedule& sched;
  const ProbeObserver& observer;
  JointDistribution& out;
  std::vector<int> outcomes;

  // `state` is the joint state immediately before the probe at `time`.
  void run(int time, const ComplexMatrix& state, Index flat) {
    if (observer) observer(ProbeEvent{time, outcomes, state});
    const int last = proc.n_times() - 1;
    if (!sched.measures(time)) {
      if (time == last) {
        out.probs()(flat) += state.trace().real();
      } else {
        run(time + 1, apply_channel(proc.steps()[static_cast<std::size_t>(time)], state), flat);
      }
      return;
    }
    for (Index x = 0; x < proc.d_sys(); ++x) {
      MeasuredState m = measure_system(state, proc.d_sys(), proc.d_env(), x);
      const Index child = flat * proc.d_sys() + x;
      if (time == last) {
        out.probs()(child) += m.probability;
        continue;
      }
      outcomes.push_back(static_cast<int>(x));
      run(time + 1, apply_channel(proc.steps()[static_cast<std::size_t>(time)], m.state), child);
      outcomes.pop_back();
    }
  }
};

}  // namespace

JointDistribution run_schedule(const DilatedProcess& proc, const ProbeSchedule& sched,
                               const ProbeObserver& observer) {
  if (sched.n_times() != proc.n_times()) {
    throw DimensionError("run_schedule: schedule covers " + std::to_string(sched.n_times()) +
                         " times, process has " + std::to_string(proc.n_times()));
  }
  JointDistribution out = JointDistribution::zeros(sched, static_cast<int>(proc.d_sys()));
  ScheduleRunner runner{proc, sched, observer, out, {}};
  runner.run(0, proc.initial_state().matrix(), 0);
  return out;
}

StatisticsFamily all_pattern_statistics(const DilatedProcess& proc) {
  StatisticsFamily fam(proc.n_times(), static_cast<int>(proc.d_sys()));
  for (std::uint32_t mask = 0; mask <= fam.full_mask(); ++mask) {
    fam.insert(run_schedule(proc, ProbeSchedule(proc.n_times(), mask)));
  }
  return fam;
}

}  // namespace qmem
