#include "qmem/paperlib.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>

#include "qmem/stats.hpp"

namespace qmem::paperlib {

using gates::identity;
using gates::ket;
using gates::ketbra;
using gates::projector;

KrausChannel feed_forward_channel() {
  return KrausChannel({ketbra(ket(2, 0), gates::ket_plus()), ketbra(ket(2, 1), gates::ket_minus())});
}

DilatedProcess build_hidden_memory_circuit() {
  const ComplexMatrix initial = kron(ComplexMatrix(identity(2) / 2.0), projector(2, 0));
  std::vector<KrausChannel> steps;
  steps.push_back(on_system(KrausChannel::unitary(gates::hadamard()), 2));
  steps.push_back(KrausChannel::unitary(gates::swap()));
  steps.push_back(compose(on_environment(feed_forward_channel(), 2),
                          KrausChannel::unitary(gates::cnot_environment_control())));
  return DilatedProcess(2, 2, DensityOperator(initial), std::move(steps));
}

DilatedProcess build_incompatible_circuit() {
  const ComplexMatrix initial = 0.5 * (projector(4, 0) + projector(4, 3));
  const KrausChannel h_sys = on_system(KrausChannel::unitary(gates::hadamard()), 2);
  std::vector<KrausChannel> steps;
  steps.push_back(h_sys);
  steps.push_back(compose(compose(h_sys, KrausChannel::unitary(gates::cnot_system_control())),
                          KrausChannel::discard_and_reprepare(2, 2, 0)));
  steps.push_back(KrausChannel::unitary(gates::cnot_environment_control()));
  return DilatedProcess(2, 2, DensityOperator(initial), std::move(steps));
}

DilatedProcess circuit(const std::string& name) {
  if (name == "fig2") return build_hidden_memory_circuit();
  if (name == "fig3") return build_incompatible_circuit();
  throw std::invalid_argument("unknown circuit '" + name + "' (expected fig2 or fig3)");
}

namespace {

// Outcomes keyed by 0-based time.
using Outcomes = std::map<int, int>;
using Rule = std::function<Rational(const Outcomes&)>;

Rational r(std::int64_t num, std::int64_t den) { return {num, den}; }
int delta(int a, int b) { return a == b ? 1 : 0; }

OracleTable make_table(std::string label, std::string circuit_name, std::string pattern,
                       TableKind kind, const Rule& rule, std::string provenance) {
  const ProbeSchedule sched = ProbeSchedule::from_bitstring(pattern);
  const JointDistribution shape = JointDistribution::zeros(sched, 2);
  const auto& times = shape.measured_times();
  OracleTable t{std::move(label), std::move(circuit_name), std::move(pattern), kind,
                times.empty() ? -1 : times.back(), {}, std::move(provenance)};
  for (Index flat = 0; flat < shape.size(); ++flat) {
    const auto xs = shape.outcomes_of(flat);
    Outcomes o;
    for (std::size_t k = 0; k < xs.size(); ++k) o[times[k]] = xs[k];
    t.expected.push_back(rule(o));
  }
  return t;
}

constexpr int t1 = 0, t2 = 1, t3 = 2, t4 = 3;

}  // namespace

std::vector<OracleTable> oracle_tables() {
  using K = TableKind;
  std::vector<OracleTable> out;
  auto x = [](const Outcomes& o, int t) { return o.at(t); };

  // Hidden-memory circuit.
  out.push_back(make_table("P(x1)", "fig2", "1000", K::kJoint,
                           [](const Outcomes&) { return r(1, 2); },
                           "hidden-memory circuit: maximally mixed initial state"));
  out.push_back(make_table("P(x2,x1)", "fig2", "1100", K::kJoint,
                           [](const Outcomes&) { return r(1, 4); },
                           "hidden-memory circuit: two-time statistics"));
  out.push_back(make_table("P(x3,x2,x1)", "fig2", "1110", K::kJoint,
                           [&](const Outcomes& o) { return r(delta(x(o, t3), 0), 4); },
                           "hidden-memory circuit: three-time statistics"));
  out.push_back(make_table("P(x3|x2,x1)", "fig2", "1110", K::kConditional,
                           [&](const Outcomes& o) { return r(delta(x(o, t3), 0), 1); },
                           "hidden-memory circuit: three-time conditional"));
  out.push_back(make_table("P(x4,x3,x2,x1)", "fig2", "1111", K::kJoint,
                           [&](const Outcomes& o) { return r(delta(x(o, t3), 0), 8); },
                           "hidden-memory circuit: full statistics"));
  out.push_back(make_table("P(x4|x3,x2,x1)", "fig2", "1111", K::kConditional,
                           [&](const Outcomes& o) { return r(delta(x(o, t3), 0), 2); },
                           "hidden-memory circuit: full conditional (impossible x3=1 -> 0)"));
  out.push_back(make_table("P(x3,I2,x1)", "fig2", "1010", K::kJoint,
                           [&](const Outcomes& o) { return r(delta(x(o, t3), 0), 2); },
                           "hidden-memory circuit: t2 unprobed, three-time statistics"));
  out.push_back(make_table("P(x3|I2,x1)", "fig2", "1010", K::kConditional,
                           [&](const Outcomes& o) { return r(delta(x(o, t3), 0), 1); },
                           "hidden-memory circuit: t2 unprobed, three-time conditional"));
  out.push_back(make_table(
      "P(x4,x3,I2,x1)", "fig2", "1011", K::kJoint,
      [&](const Outcomes& o) { return r(delta(x(o, t4), x(o, t1)) * delta(x(o, t3), 0), 2); },
      "hidden-memory circuit: t2 unprobed, four-time statistics"));
  out.push_back(make_table(
      "P(x4|x3,I2,x1)", "fig2", "1011", K::kConditional,
      [&](const Outcomes& o) { return r(delta(x(o, t4), x(o, t1)) * delta(x(o, t3), 0), 1); },
      "hidden-memory circuit: t2 unprobed, conditional depends on x1"));

  // Incompatible circuit.
  out.push_back(make_table("P(x4,x3,x2,x1)", "fig3", "1111", K::kJoint,
                           [&](const Outcomes& o) { return r(delta(x(o, t3), 0), 8); },
                           "incompatible circuit: full statistics"));
  out.push_back(make_table(
      "P(x4,x3,I2,x1)", "fig3", "1011", K::kJoint,
      [&](const Outcomes& o) { return r(delta(x(o, t3), 0) * delta(x(o, t4), x(o, t3)), 2); },
      "incompatible circuit: t2 unprobed, four-time statistics"));
  out.push_back(make_table("P(x3,x2,x1)", "fig3", "1110", K::kJoint,
                           [&](const Outcomes& o) { return r(delta(x(o, t3), 0), 4); },
                           "incompatible circuit: statistics ending at t3"));
  out.push_back(make_table("P(x3,I2,x1)", "fig3", "1010", K::kJoint,
                           [&](const Outcomes& o) { return r(delta(x(o, t3), 0), 2); },
                           "incompatible circuit: t2 unprobed, statistics ending at t3"));
  out.push_back(make_table("P(x3|x2,x1)", "fig3", "1110", K::kConditional,
                           [&](const Outcomes& o) { return r(delta(x(o, t3), 0), 1); },
                           "incompatible circuit: t3 conditional"));
  out.push_back(make_table("P(x3|I2,x1)", "fig3", "1010", K::kConditional,
                           [&](const Outcomes& o) { return r(delta(x(o, t3), 0), 1); },
                           "incompatible circuit: t3 conditional, t2 unprobed"));
  out.push_back(make_table("P(x3|x2,I1)", "fig3", "0110", K::kConditional,
                           [&](const Outcomes& o) { return r(delta(x(o, t3), 0), 1); },
                           "incompatible circuit: t3 conditional, t1 unprobed"));
  out.push_back(make_table("P(x4|x3,x2,x1)", "fig3", "1111", K::kConditional,
                           [&](const Outcomes& o) { return r(delta(x(o, t3), 0), 2); },
                           "incompatible circuit: four-time conditional"));
  out.push_back(make_table(
      "P(x4|x3,I2,x1)", "fig3", "1011", K::kConditional,
      [&](const Outcomes& o) { return r(delta(x(o, t3), 0) * delta(x(o, t4), x(o, t3)), 1); },
      "incompatible circuit: four-time conditional, t2 unprobed"));
  return out;
}

std::vector<double> computed_entries(const OracleTable& table, const JointDistribution& dist) {
  if (dist.pattern().bitstring() != table.pattern) {
    throw std::invalid_argument("computed_entries: distribution pattern " +
                                dist.pattern().bitstring() + " does not match table pattern " +
                                table.pattern);
  }
  std::vector<double> out;
  for (Index flat = 0; flat < dist.size(); ++flat) {
    if (table.kind == TableKind::kJoint) {
      out.push_back(dist.probs()(flat));
      continue;
    }
    const auto xs = dist.outcomes_of(flat);
    const auto& times = dist.measured_times();
    std::vector<TimedOutcome> history;
    for (std::size_t k = 0; k + 1 < xs.size(); ++k) history.emplace_back(times[k], xs[k]);
    out.push_back(conditional(dist, table.target_time, xs.back(), history));
  }
  return out;
}

namespace {

ComplexMatrix pm(int x) {
  return x == 0 ? ketbra(gates::ket_plus(), gates::ket_plus())
                : ketbra(gates::ket_minus(), gates::ket_minus());
}

ComplexMatrix k2(const ComplexMatrix& a, const ComplexMatrix& b) { return kron(a, b); }

}  // namespace

std::vector<AnnotatedState> annotated_states() {
  std::vector<AnnotatedState> out;
  const ComplexMatrix p0 = projector(2, 0);
  const ComplexMatrix i2 = identity(2);
  const ComplexMatrix bell_mix = 0.5 * (projector(4, 0) + projector(4, 3));

  // Hidden-memory circuit.
  for (int x1 = 0; x1 < 2; ++x1) {
    out.push_back({"rho2'(x1) (x) tau", "fig2", "1111", t2, {x1}, k2(0.5 * pm(x1), p0), false,
                   "after H on the measured initial state"});
    for (int x2 = 0; x2 < 2; ++x2) {
      out.push_back({"phi3(x2,x1)", "fig2", "1111", t3, {x1, x2},
                     k2(0.25 * p0, projector(2, x2)), false, "after SWAP with blank environment"});
      out.push_back({"phi4'(x3=0,x2,x1)", "fig2", "1111", t4, {x1, x2, 0},
                     0.125 * (projector(4, 0) + projector(4, 3)), false,
                     "after feed-forward and environment-controlled CNOT"});
    }
    out.push_back({"phi3(I2,x1)", "fig2", "1011", t3, {x1}, k2(0.5 * p0, pm(x1)), false,
                   "t2 unprobed: coherence survives the SWAP"});
    out.push_back({"phi4'(x3=0,I2,x1)", "fig2", "1011", t4, {x1, 0},
                   k2(0.5 * projector(2, x1), projector(2, x1)), false,
                   "t2 unprobed: x1 copied back onto the system"});
    out.push_back({"rho4'(x3=0,I2,x1)", "fig2", "1011", t4, {x1, 0}, 0.5 * projector(2, x1),
                   true, "t2 unprobed: reduced system state before the last probe"});
  }

  // Incompatible circuit.
  out.push_back({"phi1'", "fig3", "1111", t1, {}, bell_mix, false, "classically correlated start"});
  out.push_back({"phi2'(I1)", "fig3", "0111", t2, {},
                 0.5 * (k2(pm(0), projector(2, 0)) + k2(pm(1), projector(2, 1))), false,
                 "t1 unprobed, after H"});
  for (int x1 = 0; x1 < 2; ++x1) {
    out.push_back({"phi2'(x1)", "fig3", "1111", t2, {x1}, k2(0.5 * pm(x1), projector(2, x1)),
                   false, "after H"});
    for (int x2 = 0; x2 < 2; ++x2) {
      out.push_back({"phi3'(x2,x1)", "fig3", "1111", t3, {x1, x2}, k2(0.125 * p0, i2), false,
                     "both earlier times probed: environment maximally mixed"});
      out.push_back({"CNOT phi4(x3=0,x2,x1)", "fig3", "1111", t4, {x1, x2, 0},
                     0.125 * (projector(4, 0) + projector(4, 3)), false,
                     "environment-controlled CNOT applied to the pre-CNOT state"});
      out.push_back({"rho4'(x3=0,x2,x1)", "fig3", "1111", t4, {x1, x2, 0}, 0.125 * i2, true,
                     "reduced system state before the last probe"});
    }
    out.push_back({"phi3'(I2,x1)", "fig3", "1011", t3, {x1}, 0.5 * projector(4, 0), false,
                   "t2 unprobed: environment in |0>"});
    out.push_back({"CNOT phi4(x3=0,I2,x1)", "fig3", "1011", t4, {x1, 0}, 0.5 * projector(4, 0),
                   false, "t2 unprobed: CNOT leaves |00> fixed"});
    out.push_back({"rho4'(x3=0,I2,x1)", "fig3", "1011", t4, {x1, 0}, 0.5 * p0, true,
                   "t2 unprobed: reduced system state before the last probe"});
  }
  for (int x2 = 0; x2 < 2; ++x2) {
    out.push_back({"phi3'(x2,I1)", "fig3", "0111", t3, {x2}, k2(0.25 * p0, i2), false,
                   "t1 unprobed: environment maximally mixed"});
  }
  return out;
}

std::optional<ComplexMatrix> simulated_state(const AnnotatedState& annotation) {
  const DilatedProcess proc = circuit(annotation.circuit);
  std::optional<ComplexMatrix> found;
  run_schedule(proc, ProbeSchedule::from_bitstring(annotation.pattern),
               [&](const ProbeEvent& e) {
                 if (e.time == annotation.time && e.earlier_outcomes == annotation.earlier_outcomes) {
                   found = annotation.reduced_to_system
                               ? partial_trace(e.state, proc.d_sys(), proc.d_env(), true)
                               : e.state;
                 }
               });
  return found;
}

bool Reproduction::pass() const {
  auto ok = [](const auto& c) { return c.pass; };
  return std::all_of(tables.begin(), tables.end(), ok) &&
         std::all_of(states.begin(), states.end(), ok) &&
         std::all_of(witnesses.begin(), witnesses.end(), ok);
}

Reproduction reproduce(double tol, double stats_tol) {
  Reproduction rep;
  rep.tol = tol;
  std::map<std::string, StatisticsFamily> families;
  for (const std::string name : {"fig2", "fig3"}) {
    families.emplace(name, all_pattern_statistics(circuit(name)));
  }

  for (const auto& table : oracle_tables()) {
    const auto& dist =
        families.at(table.circuit).at(ProbeSchedule::from_bitstring(table.pattern).mask());
    TableCheck check{table, {}, computed_entries(table, dist)};
    for (Index flat = 0; flat < dist.size(); ++flat) check.outcomes.push_back(dist.outcomes_of(flat));
    check.pass = check.computed.size() == table.expected.size();
    for (std::size_t i = 0; check.pass && i < check.computed.size(); ++i) {
      check.max_error =
          std::max(check.max_error, std::abs(check.computed[i] - table.expected[i].value()));
    }
    check.pass = check.pass && check.max_error <= tol;
    rep.tables.push_back(std::move(check));
  }

  for (const auto& annotation : annotated_states()) {
    StateCheck check{annotation};
    if (auto state = simulated_state(annotation)) {
      check.reached = true;
      check.max_error = max_abs_diff(*state, annotation.expected);
      check.pass = check.max_error <= tol;
    }
    rep.states.push_back(std::move(check));
  }

  const std::pair<std::string, Verdict> expected[] = {
      {"fig2", Verdict::kHiddenMemoryNonMarkovianSub},
      {"fig3", Verdict::kHiddenMemoryIncompatible},
  };
  for (const auto& [name, verdict] : expected) {
    WitnessCheck check{name, verdict, witness_hidden_memory(families.at(name), stats_tol)};
    check.pass = check.report.verdict == verdict;
    rep.witnesses.push_back(std::move(check));
  }
  return rep;
}

}  // namespace qmem::paperlib
