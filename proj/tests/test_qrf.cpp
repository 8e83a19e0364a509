#include <doctest.h>

#include "oracles.hpp"
#include "qmem/paperlib.hpp"
#include "qmem/qrf.hpp"

using namespace qmem;
namespace g = qmem::gates;

TEST_CASE("qrf examples") {
  const MemorylessQuantumModel frozen(DensityOperator(g::projector(2, 0)),
                                      {KrausChannel::identity(2), KrausChannel::identity(2)});
  const auto frozen_fam = qrf_family(frozen);
  for (const auto& [mask, dist] : frozen_fam.entries()) {
    CHECK(std::abs(dist.probs()(0) - 1.0) < 1e-12);
  }

  const MemorylessQuantumModel had(DensityOperator::maximally_mixed(2),
                                   {KrausChannel::unitary(g::hadamard())});
  const auto full = qrf_family(had).full();
  for (Index i = 0; i < 4; ++i) CHECK(std::abs(full.probs()(i) - 0.25) < 1e-12);
}

TEST_CASE("property: qrf agrees with the direct density-matrix formula") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    const auto model = random_memoryless_model(2 + trial % 2, 4, rng, trial % 3 + 1);
    const auto fam = qrf_family(model);
    for (const auto& [mask, dist] : fam.entries()) {
      const auto want = oracle::qrf_distribution(model, dist.pattern());
      for (Index i = 0; i < dist.size(); ++i) {
        CHECK(std::abs(dist.probs()(i) - want[static_cast<std::size_t>(i)]) < 1e-12);
      }
    }
  }
}

TEST_CASE("property: qrf equals a trivially dilated process") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const auto model = random_memoryless_model(2, 4, rng);
    const DilatedProcess proc(2, 1, model.rho1(), model.channels());
    CHECK(max_abs_diff(qrf_family(model), all_pattern_statistics(proc)) < 1e-12);
  }
}

TEST_CASE("property: one-step conditionals equal the channel action") {
  // P(x_j | x_{j-1}, ..., x_1) = <x_j| L_j[|x_{j-1}><x_{j-1}|] |x_j>
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 20; ++trial) {
    const auto model = random_memoryless_model(2, 4, rng);
    const auto full = qrf_family(model).full();
    for (Index flat = 0; flat < full.size(); ++flat) {
      const auto xs = full.outcomes_of(flat);
      for (int j = 1; j < 4; ++j) {
        std::vector<TimedOutcome> history;
        for (int i = 0; i < j; ++i) history.emplace_back(i, xs[static_cast<std::size_t>(i)]);
        const ComplexMatrix out = apply_channel(model.channels()[static_cast<std::size_t>(j - 1)],
                                                g::projector(2, xs[static_cast<std::size_t>(j - 1)]));
        const double direct = out(xs[static_cast<std::size_t>(j)], xs[static_cast<std::size_t>(j)]).real();
        CHECK(std::abs(conditional(full, j, xs[static_cast<std::size_t>(j)], history) - direct) < 1e-9);
      }
    }
  }
}

TEST_CASE("parameterization sizes") {
  const StinespringParameterization p(2, 4, 0);
  CHECK(p.ancilla_dim() == 4);
  CHECK(p.state_params() == 8);
  CHECK(p.channel_params() == 28);
  CHECK(p.size() == 92);
}

TEST_CASE("property: reduced isometry equals the leading columns of exp(generator)") {
  std::mt19937_64 rng(44);
  std::normal_distribution<double> n;
  for (Index a : {1, 2, 4}) {
    for (Index d : {2, 3}) {
      const StinespringParameterization p(d, 3, a);
      for (int trial = 0; trial < 10; ++trial) {
        RealVector theta(p.size());
        for (Index i = 0; i < theta.size(); ++i) theta(i) = 2.0 * n(rng);
        for (int k = 0; k < 2; ++k) {
          const ComplexMatrix gen = p.generator(theta, k);
          CHECK(max_abs_diff(gen + gen.adjoint(), ComplexMatrix::Zero(d * a, d * a)) < 1e-15);
          const ComplexMatrix v = p.isometry(theta, k);
          CHECK(max_abs_diff(v, matrix_exp(gen).leftCols(d)) < 1e-11);
          CHECK(max_abs_diff(v.adjoint() * v, g::identity(d)) < 1e-12);
        }
        const auto model = p.decode(theta);
        CHECK(model.n_times() == 3);
        CHECK(model.channels()[0].kraus_ops().size() == static_cast<std::size_t>(a));
      }
    }
  }
}

TEST_CASE("fit recovers a two-time memoryless model") {
  std::mt19937_64 rng(45);
  const auto fam = qrf_family(random_memoryless_model(2, 2, rng));
  FitConfig cfg;
  cfg.n_starts = 4;
  cfg.max_iters = 40000;
  const auto r = fit_memoryless(fam, cfg);
  CHECK(r.residual <= 1e-6);
  CHECK(r.per_start_losses.size() == 4);
  CHECK(r.residual == doctest::Approx(family_loss(r.model, fam)));
}

TEST_CASE("fit is deterministic and thread-count independent") {
  std::mt19937_64 rng(46);
  const auto fam = qrf_family(random_memoryless_model(2, 3, rng));
  FitConfig cfg;
  cfg.n_starts = 3;
  cfg.max_iters = 1500;
  cfg.seed = 7;
  const auto a = fit_memoryless(fam, cfg);
  const auto b = fit_memoryless(fam, cfg);
  cfg.threads = 2;
  const auto c = fit_memoryless(fam, cfg);
  CHECK(a.per_start_losses == b.per_start_losses);
  CHECK(a.per_start_losses == c.per_start_losses);
  CHECK(a.best_start == c.best_start);
  CHECK(max_abs_diff(a.model.rho1().matrix(), c.model.rho1().matrix()) == 0.0);
  CHECK(start_seed(7, 0) != start_seed(7, 1));
  CHECK(start_seed(7, 0) != start_seed(8, 0));
}

TEST_CASE("fit rejects bad configurations") {
  std::mt19937_64 rng(47);
  const auto fam = qrf_family(random_memoryless_model(2, 2, rng));
  FitConfig cfg;
  cfg.n_starts = 0;
  CHECK_THROWS(fit_memoryless(fam, cfg));
  StatisticsFamily partial(2, 2);
  partial.insert(fam.full());
  CHECK_THROWS_AS(fit_memoryless(partial, FitConfig{}), IncompleteFamilyError);
}

TEST_CASE("certify conclusions") {
  FitConfig quick;
  quick.n_starts = 1;
  quick.max_iters = 200;
  const auto fig2 = all_pattern_statistics(paperlib::build_hidden_memory_circuit());
  const auto r2 = certify(fig2, quick);
  CHECK(r2.conclusion == Conclusion::kNoModelWitnessed);
  CHECK(r2.witness.verdict == Verdict::kHiddenMemoryNonMarkovianSub);
  CHECK(r2.fit.residual > 0.0);

  std::mt19937_64 rng(48);
  const auto fam = qrf_family(random_memoryless_model(2, 4, rng));
  const auto r = certify(fam, quick);
  CHECK(r.witness.verdict == Verdict::kConsistentWithMemoryless);
  CHECK(r.conclusion == Conclusion::kInconclusive);

  // Non-Markovian full statistics also rule out a memoryless model.
  StatisticsFamily memory(3, 2);
  RealVector p = RealVector::Zero(8);
  for (int x1 = 0; x1 < 2; ++x1) {
    for (int x2 = 0; x2 < 2; ++x2) p(x1 * 4 + x2 * 2 + x1) = 0.25;
  }
  const JointDistribution full(ProbeSchedule::full(3), 2, p);
  for (std::uint32_t mask = 0; mask < 8u; ++mask) memory.insert(full.marginal(mask));
  REQUIRE(witness_hidden_memory(memory).verdict == Verdict::kNonMarkovian);
  CHECK(certify(memory, quick).conclusion == Conclusion::kNoModelWitnessed);
}
