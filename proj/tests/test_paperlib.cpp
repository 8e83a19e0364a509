#include <doctest.h>

#include "qmem/paperlib.hpp"

using namespace qmem;
using namespace qmem::paperlib;

namespace {

const OracleTable* find_table(const std::string& circuit_name, const std::string& pattern,
                              TableKind kind) {
  static const auto tables = oracle_tables();
  for (const auto& t : tables) {
    if (t.circuit == circuit_name && t.pattern == pattern && t.kind == kind) return &t;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("circuit shapes") {
  for (const auto& proc : {build_hidden_memory_circuit(), build_incompatible_circuit()}) {
    CHECK(proc.d_sys() == 2);
    CHECK(proc.d_env() == 2);
    CHECK(proc.n_times() == 4);
  }
  CHECK_THROWS(circuit("fig9"));
}

TEST_CASE("oracle tables cover the displayed distributions") {
  const auto* a = find_table("fig2", "1111", TableKind::kJoint);
  REQUIRE(a);
  for (std::size_t i = 0; i < a->expected.size(); ++i) {
    const bool x3_zero = ((i >> 1) & 1u) == 0;  // x1 x2 x3 x4, x4 fastest
    CHECK(a->expected[i].value() == (x3_zero ? 0.125 : 0.0));
  }
  const auto* b = find_table("fig2", "1011", TableKind::kJoint);
  REQUIRE(b);
  for (std::size_t i = 0; i < b->expected.size(); ++i) {
    const int x1 = static_cast<int>(i >> 2);
    const int x3 = static_cast<int>((i >> 1) & 1u);
    const int x4 = static_cast<int>(i & 1u);
    CHECK(b->expected[i].value() == (x3 == 0 && x4 == x1 ? 0.5 : 0.0));
  }
  const auto* c = find_table("fig3", "1110", TableKind::kJoint);
  REQUIRE(c);
  for (std::size_t i = 0; i < c->expected.size(); ++i) {
    CHECK(c->expected[i].value() == ((i & 1u) == 0 ? 0.25 : 0.0));
  }
}

TEST_CASE("oracle tables are well formed") {
  for (const auto& t : oracle_tables()) {
    CAPTURE(t.label);
    CHECK_FALSE(t.provenance.empty());
    const auto sched = ProbeSchedule::from_bitstring(t.pattern);
    std::size_t size = 1;
    for (int k = 0; k < sched.count(); ++k) size *= 2;
    CHECK(t.expected.size() == size);
    if (t.kind == TableKind::kJoint) {
      double total = 0.0;
      for (const auto& r : t.expected) total += r.value();
      CHECK(total == 1.0);
    }
    for (const auto& r : t.expected) CHECK(r.den > 0);
  }
}

TEST_CASE("every oracle table matches the simulator") {
  for (const auto& t : oracle_tables()) {
    CAPTURE(t.label);
    CAPTURE(t.pattern);
    const auto dist = run_schedule(circuit(t.circuit), ProbeSchedule::from_bitstring(t.pattern));
    const auto got = computed_entries(t, dist);
    REQUIRE(got.size() == t.expected.size());
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - t.expected[i].value()) < 1e-12);
  }
}

TEST_CASE("annotated intermediate states match the simulator") {
  const auto states = annotated_states();
  CHECK(states.size() >= 10);
  for (const auto& a : states) {
    CAPTURE(a.label);
    const auto got = simulated_state(a);
    REQUIRE(got.has_value());
    CHECK(max_abs_diff(*got, a.expected) < 1e-12);
  }
}

TEST_CASE("reproduction passes at machine precision") {
  for (double tol : {1e-9, 1e-15}) {
    const auto rep = reproduce(tol);
    CHECK(rep.pass());
    CHECK(rep.tables.size() == oracle_tables().size());
    CHECK(rep.witnesses.size() == 2);
  }
}
