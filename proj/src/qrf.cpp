#include "qmem/qrf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include <unsupported/Eigen/MatrixFunctions>

#include "qmem/nelder_mead.hpp"

namespace qmem {

MemorylessQuantumModel::MemorylessQuantumModel(DensityOperator rho1,
                                               std::vector<KrausChannel> channels)
    : rho1_(std::move(rho1)), channels_(std::move(channels)) {
  for (std::size_t k = 0; k < channels_.size(); ++k) {
    if (channels_[k].dim_in() != dim() || channels_[k].dim_out() != dim()) {
      throw DimensionError("MemorylessQuantumModel: channel " + std::to_string(k) +
                           " does not map dimension " + std::to_string(dim()) + " to itself");
    }
  }
  if (n_times() > kMaxTimes) {
    throw std::invalid_argument("MemorylessQuantumModel: too many times");
  }
}

namespace {

// Evaluates every pattern of a memoryless model in one pass over the tree of
// (skip | outcome) choices, in the Liouville picture: states are column-major
// vec(rho) and channel k acts as the d^2 x d^2 superoperator supers[k].
class FamilyEvaluator {
 public:
  FamilyEvaluator(Index d, int n_times) : d_(d), n_(n_times), work_(n_times) {
    Index offset = 0;
    const std::uint32_t n_masks = 1u << n_times;
    offsets_.resize(n_masks);
    for (std::uint32_t m = 0; m < n_masks; ++m) {
      offsets_[m] = offset;
      Index size = 1;
      for (int j = 0; j < n_times; ++j) {
        if ((m >> j) & 1u) size *= d;
      }
      offset += size;
    }
    total_ = offset;
    for (auto& w : work_) w.resize(d * d);
  }

  Index total() const { return total_; }
  Index offset(std::uint32_t mask) const { return offsets_[mask]; }

  void evaluate(const ComplexMatrix& rho1, const std::vector<ComplexMatrix>& supers,
                RealVector& out) {
    out.setZero(total_);
    supers_ = &supers;
    out_ = &out;
    work_[0] = Eigen::Map<const ComplexVector>(rho1.data(), d_ * d_);
    visit(0, 0u, 0);
  }

 private:
  double trace(const ComplexVector& v) const {
    double t = 0.0;
    for (Index x = 0; x < d_; ++x) t += v(x * d_ + x).real();
    return t;
  }

  // work_[j] holds the state right before the probe at t_{j+1}.
  void visit(int j, std::uint32_t mask, Index flat) {
    const ComplexVector& v = work_[static_cast<std::size_t>(j)];
    const bool last = j == n_ - 1;
    if (last) {
      (*out_)(offsets_[mask] + flat) += trace(v);
      const std::uint32_t m = mask | (1u << j);
      for (Index x = 0; x < d_; ++x) (*out_)(offsets_[m] + flat * d_ + x) += v(x * d_ + x).real();
      return;
    }
    const ComplexMatrix& s = (*supers_)[static_cast<std::size_t>(j)];
    ComplexVector& next = work_[static_cast<std::size_t>(j) + 1];
    // Measured branches first: the skip branch below overwrites next from v,
    // which stays untouched until then.
    for (Index x = 0; x < d_; ++x) {
      const double p = work_[static_cast<std::size_t>(j)](x * d_ + x).real();
      next.noalias() = p * s.col(x * d_ + x);
      visit(j + 1, mask | (1u << j), flat * d_ + x);
    }
    next.noalias() = s * work_[static_cast<std::size_t>(j)];
    visit(j + 1, mask, flat);
  }

  Index d_;
  int n_;
  Index total_ = 0;
  std::vector<Index> offsets_;
  std::vector<ComplexVector> work_;
  const std::vector<ComplexMatrix>* supers_ = nullptr;
  RealVector* out_ = nullptr;
};

ComplexMatrix superoperator_of(const std::vector<ComplexMatrix>& kraus) {
  const Index d = kraus.front().rows();
  ComplexMatrix s = ComplexMatrix::Zero(d * d, d * d);
  for (const auto& k : kraus) {
    for (Index i = 0; i < d; ++i) {
      for (Index j = 0; j < d; ++j) {
        s.block(i * d, j * d, d, d) += std::conj(k(i, j)) * k;
      }
    }
  }
  return s;
}

StatisticsFamily unflatten(const RealVector& flat, int n_times, Index d) {
  StatisticsFamily fam(n_times, static_cast<int>(d));
  Index offset = 0;
  for (std::uint32_t m = 0; m <= fam.full_mask(); ++m) {
    JointDistribution dist = JointDistribution::zeros(ProbeSchedule(n_times, m), static_cast<int>(d));
    dist.probs() = flat.segment(offset, dist.size());
    offset += dist.size();
    fam.insert(std::move(dist));
  }
  return fam;
}

std::vector<ComplexMatrix> supers_of(const MemorylessQuantumModel& model) {
  std::vector<ComplexMatrix> supers;
  for (const auto& ch : model.channels()) supers.push_back(ch.superoperator());
  return supers;
}

}  // namespace

StatisticsFamily qrf_family(const MemorylessQuantumModel& model) {
  FamilyEvaluator eval(model.dim(), model.n_times());
  RealVector flat;
  eval.evaluate(model.rho1().matrix(), supers_of(model), flat);
  return unflatten(flat, model.n_times(), model.dim());
}

RealVector flatten(const StatisticsFamily& fam) {
  if (!fam.is_complete()) {
    throw IncompleteFamilyError("flatten: family is incomplete", fam.missing_patterns());
  }
  Index total = 0;
  for (const auto& [mask, dist] : fam.entries()) total += dist.size();
  RealVector out(total);
  Index offset = 0;
  for (const auto& [mask, dist] : fam.entries()) {
    out.segment(offset, dist.size()) = dist.probs();
    offset += dist.size();
  }
  return out;
}

double family_loss(const MemorylessQuantumModel& model, const StatisticsFamily& target) {
  return (flatten(qrf_family(model)) - flatten(target)).squaredNorm();
}

ComplexMatrix haar_unitary(Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(2.0));
  ComplexMatrix z(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) z(i, j) = Complex(normal(rng), normal(rng));
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(d, d);
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < d; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

DensityOperator random_density(Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix g(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) g(i, j) = Complex(normal(rng), normal(rng));
  }
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityOperator(0.5 * (rho + rho.adjoint()));
}

KrausChannel random_channel(Index d, Index ancilla_dim, std::mt19937_64& rng) {
  const ComplexMatrix u = haar_unitary(d * ancilla_dim, rng);
  std::vector<ComplexMatrix> ops;
  for (Index k = 0; k < ancilla_dim; ++k) ops.push_back(u.block(k * d, 0, d, d));
  return KrausChannel(std::move(ops));
}

MemorylessQuantumModel random_memoryless_model(Index d, int n_times, std::mt19937_64& rng,
                                               Index ancilla_dim) {
  if (ancilla_dim == 0) ancilla_dim = d * d;
  DensityOperator rho1 = random_density(d, rng);
  std::vector<KrausChannel> channels;
  for (int k = 0; k + 1 < n_times; ++k) channels.push_back(random_channel(d, ancilla_dim, rng));
  return MemorylessQuantumModel(std::move(rho1), std::move(channels));
}

StinespringParameterization::StinespringParameterization(Index d, int n_times, Index ancilla_dim)
    : d_(d), n_times_(n_times), a_(ancilla_dim == 0 ? d * d : ancilla_dim) {
  if (d < 1 || n_times < 1 || a_ < 1) {
    throw std::invalid_argument("StinespringParameterization: dimensions must be positive");
  }
}

ComplexMatrix StinespringParameterization::state(const RealVector& theta) const {
  if (theta.size() != size()) {
    throw DimensionError("StinespringParameterization: expected " + std::to_string(size()) +
                         " parameters, got " + std::to_string(theta.size()));
  }
  ComplexMatrix g(d_, d_);
  for (Index i = 0; i < d_; ++i) {
    for (Index j = 0; j < d_; ++j) {
      g(i, j) = Complex(theta(i * d_ + j), theta(d_ * d_ + i * d_ + j));
    }
  }
  ComplexMatrix rho = g * g.adjoint();
  const double tr = rho.trace().real();
  if (!(tr > 0.0)) throw std::domain_error("StinespringParameterization: zero state generator");
  rho /= tr;
  return 0.5 * (rho + rho.adjoint());
}

ComplexMatrix StinespringParameterization::generator(const RealVector& theta, int k) const {
  const Index big = d_ * a_;
  ComplexMatrix gen = ComplexMatrix::Zero(big, big);
  gen.topLeftCorner(d_, d_) = skew_block(theta, k);
  const ComplexMatrix c = lower_block(theta, k);
  gen.bottomLeftCorner(big - d_, d_) = c;
  gen.topRightCorner(d_, big - d_) = -c.adjoint();
  return gen;
}

ComplexMatrix StinespringParameterization::skew_block(const RealVector& theta, int k) const {
  if (theta.size() != size()) {
    throw DimensionError("StinespringParameterization: expected " + std::to_string(size()) +
                         " parameters, got " + std::to_string(theta.size()));
  }
  ComplexMatrix b = ComplexMatrix::Zero(d_, d_);
  Index p = state_params() + channel_params() * k;
  for (Index i = 0; i < d_; ++i) b(i, i) = Complex(0.0, theta(p++));
  for (Index i = 0; i < d_; ++i) {
    for (Index j = i + 1; j < d_; ++j) {
      const Complex z(theta(p), theta(p + 1));
      p += 2;
      b(i, j) = z;
      b(j, i) = -std::conj(z);
    }
  }
  return b;
}

ComplexMatrix StinespringParameterization::lower_block(const RealVector& theta, int k) const {
  ComplexMatrix c(d_ * (a_ - 1), d_);
  Index p = state_params() + channel_params() * k + d_ * d_;
  for (Index i = 0; i < c.rows(); ++i) {
    for (Index j = 0; j < d_; ++j) {
      c(i, j) = Complex(theta(p), theta(p + 1));
      p += 2;
    }
  }
  return c;
}

ComplexMatrix StinespringParameterization::isometry(const RealVector& theta, int k) const {
  const ComplexMatrix b = skew_block(theta, k);
  if (a_ == 1) return b.exp();
  // The generator leaves span{[I;0], [0;Q]} invariant, where C = QR is a thin
  // QR factorization, and acts there as [[B, -R^dagger], [R, 0]]. Exponentiating
  // that 2d x 2d block gives the first d columns of exp(generator).
  const ComplexMatrix c = lower_block(theta, k);
  Eigen::HouseholderQR<ComplexMatrix> qr(c);
  const ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(c.rows(), d_);
  const ComplexMatrix r = q.adjoint() * c;
  ComplexMatrix small(2 * d_, 2 * d_);
  small << b, -r.adjoint(), r, ComplexMatrix::Zero(d_, d_);
  const ComplexMatrix x = small.exp().leftCols(d_);
  ComplexMatrix v(d_ * a_, d_);
  v.topRows(d_) = x.topRows(d_);
  v.bottomRows(c.rows()).noalias() = q * x.bottomRows(d_);
  return v;
}

MemorylessQuantumModel StinespringParameterization::decode(const RealVector& theta) const {
  DensityOperator rho1(state(theta));
  std::vector<KrausChannel> channels;
  for (int k = 0; k + 1 < n_times_; ++k) {
    const ComplexMatrix v = isometry(theta, k);
    std::vector<ComplexMatrix> ops;
    for (Index b = 0; b < a_; ++b) ops.push_back(v.block(b * d_, 0, d_, d_));
    channels.emplace_back(std::move(ops));
  }
  return MemorylessQuantumModel(std::move(rho1), std::move(channels));
}

std::uint64_t start_seed(std::uint64_t seed, int start_index) {
  // splitmix64 finalizer over the combined words
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(start_index) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

struct StartOutcome {
  RealVector theta;
  double loss = std::numeric_limits<double>::infinity();
};

class LossFunction {
 public:
  LossFunction(const StinespringParameterization& param, const RealVector& target)
      : param_(param), target_(target), eval_(param.dim(), param.n_times()) {}

  double operator()(const RealVector& theta) {
    const ComplexMatrix rho = param_.state(theta);
    supers_.clear();
    for (int k = 0; k + 1 < param_.n_times(); ++k) {
      const ComplexMatrix v = param_.isometry(theta, k);
      kraus_.clear();
      for (Index b = 0; b < param_.ancilla_dim(); ++b) {
        kraus_.push_back(v.block(b * param_.dim(), 0, param_.dim(), param_.dim()));
      }
      supers_.push_back(superoperator_of(kraus_));
    }
    eval_.evaluate(rho, supers_, probs_);
    return (probs_ - target_).squaredNorm();
  }

 private:
  const StinespringParameterization& param_;
  const RealVector& target_;
  FamilyEvaluator eval_;
  std::vector<ComplexMatrix> kraus_;
  std::vector<ComplexMatrix> supers_;
  RealVector probs_;
};

StartOutcome run_start(const StinespringParameterization& param, const RealVector& target,
                       const FitConfig& cfg, int index) {
  std::mt19937_64 rng(start_seed(cfg.seed, index));
  std::normal_distribution<double> normal(0.0, 1.0);
  RealVector x0(param.size());
  for (Index i = 0; i < x0.size(); ++i) x0(i) = normal(rng);

  LossFunction loss(param, target);
  NelderMeadOptions opts;
  opts.max_iterations = cfg.max_iters;
  opts.f_tol = cfg.convergence_tol * 1e-4;
  opts.restart_improvement = cfg.convergence_tol;
  opts.target = cfg.loss_floor * 1e-3;
  auto objective = [&loss](const RealVector& th) {
    try {
      return loss(th);
    } catch (const std::domain_error&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  NelderMeadResult r = nelder_mead(objective, x0, opts, rng);
  return {std::move(r.x), r.f};
}

}  // namespace

FitResult fit_memoryless(const StatisticsFamily& target, const FitConfig& cfg) {
  if (cfg.n_starts < 1 || cfg.max_iters < 1 || cfg.threads < 1 || cfg.ancilla_dim < 0 ||
      !(cfg.convergence_tol > 0.0) || !(cfg.loss_floor > 0.0)) {
    throw std::invalid_argument("fit_memoryless: configuration values must be positive");
  }
  const Index d = target.outcome_dim();
  if (d > 4) throw std::invalid_argument("fit_memoryless: system dimension above 4");
  const StinespringParameterization param(d, target.n_times(), cfg.ancilla_dim);
  const RealVector flat = flatten(target);

  std::vector<StartOutcome> outcomes(static_cast<std::size_t>(cfg.n_starts));
  const int workers = std::min(cfg.threads, cfg.n_starts);
  if (workers <= 1) {
    for (int k = 0; k < cfg.n_starts; ++k) outcomes[k] = run_start(param, flat, cfg, k);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int k = w; k < cfg.n_starts; k += workers) {
          outcomes[static_cast<std::size_t>(k)] = run_start(param, flat, cfg, k);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  int best = 0;
  std::vector<double> losses;
  for (int k = 0; k < cfg.n_starts; ++k) {
    losses.push_back(outcomes[static_cast<std::size_t>(k)].loss);
    if (losses.back() < losses[static_cast<std::size_t>(best)]) best = k;
  }
  MemorylessQuantumModel model = param.decode(outcomes[static_cast<std::size_t>(best)].theta);
  // Report the loss of the decoded model itself.
  const double residual = family_loss(model, target);
  return FitResult{std::move(model), residual, std::move(losses), best};
}

std::string to_string(Conclusion c) {
  switch (c) {
    case Conclusion::kModelFound:
      return "MODEL_FOUND";
    case Conclusion::kNoModelWitnessed:
      return "NO_MODEL_WITNESSED";
    case Conclusion::kInconclusive:
      return "INCONCLUSIVE";
  }
  return "UNKNOWN";
}

CertifyReport certify(const StatisticsFamily& target, const FitConfig& cfg, double tol) {
  AnalysisReport witness = witness_hidden_memory(target, tol);
  FitResult fit = fit_memoryless(target, cfg);
  Conclusion c = Conclusion::kInconclusive;
  // Non-Markovian full statistics already rule out a memoryless model.
  if (witness.verdict != Verdict::kConsistentWithMemoryless) {
    c = Conclusion::kNoModelWitnessed;
  } else if (fit.residual < cfg.loss_floor) {
    c = Conclusion::kModelFound;
  }
  return CertifyReport{std::move(fit), std::move(witness), c};
}

}  // namespace qmem
