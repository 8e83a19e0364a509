#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qmem/quantum.hpp"
#include "qmem/stats.hpp"

namespace qmem::paperlib {

/// Two-qubit circuit whose fully probed statistics are Markovian while the
/// statistics with t_2 left unprobed are not.
///
///   initial   (1/2) I (x) |0><0|        (system maximally mixed, blank environment)
///   t1 -> t2  H on the system
///   t2 -> t3  SWAP
///   t3 -> t4  environment measured in the +/- basis and reprepared as |0>/|1>
///             (Kraus {|0><+|, |1><-|}), then CNOT with the environment as control
DilatedProcess build_hidden_memory_circuit();

/// Two-qubit circuit whose statistics are Markovian for every probing pattern
/// yet incompatible across patterns.
///
///   initial   (1/2)(|00><00| + |11><11|)
///   t1 -> t2  H on the system
///   t2 -> t3  H on the system, CNOT with the system as control, then the
///             system is discarded and reprepared in |0>
///   t3 -> t4  CNOT with the environment as control
DilatedProcess build_incompatible_circuit();

/// Environment feed-forward channel: Kraus {|0><+|, |1><-|}.
KrausChannel feed_forward_channel();

struct Rational {
  std::int64_t num;
  std::int64_t den;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

enum class TableKind {
  kJoint,        // P(x_Gamma)
  kConditional,  // P(x_target | all earlier outcomes of the pattern)
};

/// Exact reference table for one pattern of one circuit. Entries follow the
/// pattern's outcome order (earliest measured time slowest).
struct OracleTable {
  std::string label;
  std::string circuit;  // "fig2" or "fig3"
  std::string pattern;  // bitstring, t_1 leftmost
  TableKind kind;
  int target_time;  // 0-based; last measured time for joint tables
  std::vector<Rational> expected;
  std::string provenance;
};

std::vector<OracleTable> oracle_tables();

/// Reference joint state right before a probe, for one branch of one pattern.
struct AnnotatedState {
  std::string label;
  std::string circuit;
  std::string pattern;
  int time;                           // 0-based probe time
  std::vector<int> earlier_outcomes;  // outcomes at earlier measured times
  ComplexMatrix expected;             // unnormalized
  bool reduced_to_system;             // compare tr_E of the simulated state
  std::string provenance;
};

std::vector<AnnotatedState> annotated_states();

/// Circuit by name ("fig2" or "fig3").
DilatedProcess circuit(const std::string& name);

/// Table entries computed from a simulated distribution of the table's
/// circuit and pattern.
std::vector<double> computed_entries(const OracleTable& table, const JointDistribution& dist);

/// Simulated joint state matching an annotation; nullopt if the branch is
/// never reached.
std::optional<ComplexMatrix> simulated_state(const AnnotatedState& annotation);

struct TableCheck {
  OracleTable table;
  std::vector<std::vector<int>> outcomes;  // per entry, in measured-time order
  std::vector<double> computed;
  double max_error = 0.0;
  bool pass = false;
};

struct StateCheck {
  AnnotatedState annotation;
  bool reached = false;
  double max_error = 0.0;
  bool pass = false;
};

struct WitnessCheck {
  std::string circuit;
  Verdict expected;
  AnalysisReport report;
  bool pass = false;
};

struct Reproduction {
  double tol = 0.0;
  std::vector<TableCheck> tables;
  std::vector<StateCheck> states;
  std::vector<WitnessCheck> witnesses;

  bool pass() const;
};

/// Simulate both circuits and compare every oracle table and annotated state
/// within `tol`; run the witness on both families with `stats_tol`.
Reproduction reproduce(double tol = 1e-9, double stats_tol = kStatsTol);

}  // namespace qmem::paperlib
