#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "qmem/quantum.hpp"
#include "qmem/stats.hpp"

namespace qmem {

/// Initial system state plus mutually independent system-only CPTP maps, one
/// per interval between probe times.
class MemorylessQuantumModel {
 public:
  MemorylessQuantumModel(DensityOperator rho1, std::vector<KrausChannel> channels);

  Index dim() const { return rho1_.dim(); }
  int n_times() const { return static_cast<int>(channels_.size()) + 1; }
  const DensityOperator& rho1() const { return rho1_; }
  const std::vector<KrausChannel>& channels() const { return channels_; }

 private:
  DensityOperator rho1_;
  std::vector<KrausChannel> channels_;
};

/// Statistics of every probing pattern by the quantum regression formula:
/// channels alternate with the projection P_x at measured times and the
/// identity at skipped times, and the result is traced.
StatisticsFamily qrf_family(const MemorylessQuantumModel& model);

/// Haar-random unitary of dimension d (QR of a complex Ginibre matrix with
/// phase-corrected R).
ComplexMatrix haar_unitary(Index d, std::mt19937_64& rng);
/// Random state G G^dagger / tr(G G^dagger) with Gaussian G.
DensityOperator random_density(Index d, std::mt19937_64& rng);
/// Channel from the first d columns of a Haar-random unitary on d * ancilla_dim.
KrausChannel random_channel(Index d, Index ancilla_dim, std::mt19937_64& rng);
MemorylessQuantumModel random_memoryless_model(Index d, int n_times, std::mt19937_64& rng,
                                               Index ancilla_dim = 0);

struct FitConfig {
  int n_starts = 32;
  /// Simplex iterations per start, shared by all of its restarts.
  std::int64_t max_iters = 200000;
  std::uint64_t seed = 0;
  /// 0 means d^2.
  Index ancilla_dim = 0;
  double convergence_tol = 1e-10;
  double loss_floor = 1e-12;
  int threads = 1;
};

/// Real parameter vector <-> memoryless model.
///
/// rho_1 = G G^dagger / tr(G G^dagger) with G a free complex d x d matrix.
/// Each channel is the Stinespring isometry formed by the first d columns of
/// exp(A) on C^d (x) C^a (ancilla slow), where A is anti-Hermitian with only
/// the blocks that reach those columns free: A = [[B, -C^dagger], [C, 0]],
/// B anti-Hermitian d x d and C complex d(a-1) x d. Kraus operators are the
/// d x d row blocks of the isometry.
class StinespringParameterization {
 public:
  StinespringParameterization(Index d, int n_times, Index ancilla_dim);

  Index dim() const { return d_; }
  int n_times() const { return n_times_; }
  Index ancilla_dim() const { return a_; }
  Index size() const { return state_params() + channel_params() * (n_times_ - 1); }
  Index state_params() const { return 2 * d_ * d_; }
  Index channel_params() const { return d_ * d_ + 2 * d_ * d_ * (a_ - 1); }

  ComplexMatrix state(const RealVector& theta) const;
  /// Full anti-Hermitian generator of channel k (d * a square).
  ComplexMatrix generator(const RealVector& theta, int k) const;
  /// d * a x d isometry for channel k: the first d columns of exp(generator).
  ComplexMatrix isometry(const RealVector& theta, int k) const;
  MemorylessQuantumModel decode(const RealVector& theta) const;

 private:
  ComplexMatrix skew_block(const RealVector& theta, int k) const;
  ComplexMatrix lower_block(const RealVector& theta, int k) const;

  Index d_;
  int n_times_;
  Index a_;
};

/// Flat layout of a complete family: patterns in ascending mask order, each
/// pattern's probabilities in its documented outcome order.
RealVector flatten(const StatisticsFamily& fam);

/// Sum over all patterns and outcomes of (model - target)^2.
double family_loss(const MemorylessQuantumModel& model, const StatisticsFamily& target);

struct FitResult {
  MemorylessQuantumModel model;
  double residual;
  std::vector<double> per_start_losses;
  int best_start;
};

/// Multistart simplex search for a memoryless model reproducing `target`.
/// Start k is seeded from (cfg.seed, k) alone; the best start is the lowest
/// loss, ties to the lowest index.
FitResult fit_memoryless(const StatisticsFamily& target, const FitConfig& cfg);

enum class Conclusion { kModelFound, kNoModelWitnessed, kInconclusive };
std::string to_string(Conclusion c);

struct CertifyReport {
  FitResult fit;
  AnalysisReport witness;
  Conclusion conclusion;
};

/// Witness first; the fitter always runs (as corroboration when the witness
/// fires). Any verdict other than CONSISTENT_WITH_MEMORYLESS gives
/// NO_MODEL_WITNESSED. MODEL_FOUND iff the witness passed and residual < loss_floor.
CertifyReport certify(const StatisticsFamily& target, const FitConfig& cfg,
                      double tol = kStatsTol);

/// Per-start seed derived from the base seed and start index.
std::uint64_t start_seed(std::uint64_t seed, int start_index);

}  // namespace qmem
