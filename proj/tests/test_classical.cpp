#include <doctest.h>

#include "oracles.hpp"
#include "qmem/classical.hpp"
#include "qmem/paperlib.hpp"
#include "test_support.hpp"

using namespace qmem;

namespace {

StochasticMatrix flip() {
  RealMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return StochasticMatrix(m);
}

RealVector vec2(double a, double b) {
  RealVector v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("stochastic matrices are validated") {
  RealMatrix bad(2, 2);
  bad << 0.5, 0.5, 0.6, 0.5;
  CHECK_THROWS(StochasticMatrix(bad));
  bad << 1.2, 0.5, -0.2, 0.5;
  CHECK_THROWS(StochasticMatrix(bad));
  CHECK_THROWS(ClassicalMemorylessModel(vec2(0.7, 0.7), {flip()}));
}

TEST_CASE("classical_predict examples") {
  const ClassicalMemorylessModel frozen(vec2(0.5, 0.5),
                                        {StochasticMatrix::identity(2), StochasticMatrix::identity(2)});
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int c = 0; c < 2; ++c) {
        const int xs[] = {a, b, c};
        CHECK(classical_predict(frozen, xs) == doctest::Approx(a == b && b == c ? 0.5 : 0.0));
      }
    }
  }

  const ClassicalMemorylessModel flipper(vec2(1, 0), {flip()});
  const int yes[] = {0, 1};
  const int no[] = {0, 0};
  CHECK(classical_predict(flipper, yes) == 1.0);
  CHECK(classical_predict(flipper, no) == 0.0);

  const ClassicalMemorylessModel mixing(vec2(1, 0),
                                        {StochasticMatrix::uniform(2), StochasticMatrix::uniform(2)});
  for (int x2 = 0; x2 < 2; ++x2) {
    for (int x3 = 0; x3 < 2; ++x3) {
      const int a[] = {0, x2, x3};
      const int b[] = {1, x2, x3};
      CHECK(classical_predict(mixing, a) == doctest::Approx(0.25));
      CHECK(classical_predict(mixing, b) == 0.0);
    }
  }
  const int short_seq[] = {0, 1};
  CHECK_THROWS(classical_predict(mixing, short_seq));
}

TEST_CASE("classical_family marginalizes the full table") {
  const ClassicalMemorylessModel mixing(vec2(1, 0),
                                        {StochasticMatrix::uniform(2), StochasticMatrix::uniform(2)});
  const auto fam = classical_family(mixing);
  const auto& skip = fam.at(ProbeSchedule::from_bitstring("101").mask());
  for (int x3 = 0; x3 < 2; ++x3) {
    const int a[] = {0, x3};
    const int b[] = {1, x3};
    CHECK(skip(a) == doctest::Approx(0.5));
    CHECK(skip(b) == 0.0);
  }
  CHECK(kolmogorov_consistent(fam, 1e-12).ok);
}

TEST_CASE("property: classical families match brute-force sums and pass every check") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const auto model = support::random_classical(rng, 4);
    const auto fam = classical_family(model);
    for (const auto& [mask, dist] : fam.entries()) {
      const auto want = oracle::classical_distribution(model, dist.pattern());
      for (Index i = 0; i < dist.size(); ++i) {
        CHECK(std::abs(dist.probs()(i) - want[static_cast<std::size_t>(i)]) < 1e-12);
      }
    }
    const auto rep = witness_hidden_memory(fam);
    CHECK(rep.markov_full.ok);
    CHECK(rep.markov_sub.ok);
    CHECK(rep.compatible.ok);
    CHECK(kolmogorov_consistent(fam, 1e-12).ok);
  }
}

TEST_CASE("property: fit_classical round-trips Markovian distributions") {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 50; ++trial) {
    const auto model = support::random_classical(rng, 4);
    const auto full = classical_family(model).full();
    const auto fit = fit_classical(full);
    REQUIRE(std::holds_alternative<ClassicalFit>(fit));
    const auto& m = std::get<ClassicalFit>(fit).model;
    for (Index i = 0; i < full.size(); ++i) {
      const auto xs = full.outcomes_of(i);
      CHECK(std::abs(classical_predict(m, xs) - full.probs()(i)) < 1e-12);
    }
    for (const auto& s : m.steps()) {
      CHECK((s.entries().colwise().sum().array() - 1.0).abs().maxCoeff() < 1e-15);
    }
  }
}

TEST_CASE("fit_classical recovers a deterministic flip") {
  const ClassicalMemorylessModel flipper(vec2(0.5, 0.5), {flip()});
  const auto fit = fit_classical(classical_family(flipper).full());
  REQUIRE(std::holds_alternative<ClassicalFit>(fit));
  const auto& got = std::get<ClassicalFit>(fit);
  CHECK((got.model.steps()[0].entries() - flip().entries()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(got.unreachable.empty());
}

TEST_CASE("fit_classical fills unreachable columns uniformly") {
  const ClassicalMemorylessModel flipper(vec2(1, 0), {flip()});
  const auto fit = fit_classical(classical_family(flipper).full());
  REQUIRE(std::holds_alternative<ClassicalFit>(fit));
  const auto& got = std::get<ClassicalFit>(fit);
  REQUIRE(got.unreachable.size() == 1);
  CHECK(got.unreachable[0].step == 0);
  CHECK(got.unreachable[0].source == 1);
  CHECK(got.model.steps()[0](0, 1) == 0.5);
  CHECK(got.model.steps()[0](1, 0) == 1.0);
}

TEST_CASE("fit_classical returns the violation for non-Markovian input") {
  RealVector p = RealVector::Zero(8);
  for (int x1 = 0; x1 < 2; ++x1) {
    for (int x2 = 0; x2 < 2; ++x2) p(x1 * 4 + x2 * 2 + x1) = 0.25;
  }
  const auto fit = fit_classical(JointDistribution(ProbeSchedule::full(3), 2, p));
  REQUIRE(std::holds_alternative<MarkovViolation>(fit));
  CHECK(std::get<MarkovViolation>(fit).target_time == 2);
}

TEST_CASE("a classical model of the hidden-memory full table misses its sub-statistics") {
  const auto quantum = all_pattern_statistics(paperlib::build_hidden_memory_circuit());
  const auto fit = fit_classical(quantum.full());
  REQUIRE(std::holds_alternative<ClassicalFit>(fit));
  const auto classical = classical_family(std::get<ClassicalFit>(fit).model);
  const auto& full_c = classical.full();
  CHECK((full_c.probs() - quantum.full().probs()).cwiseAbs().maxCoeff() < 1e-12);

  const auto skip = ProbeSchedule::from_bitstring("1011").mask();
  const double gap = (classical.at(skip).probs() - quantum.at(skip).probs()).cwiseAbs().maxCoeff();
  CHECK(gap == doctest::Approx(0.25));
}
