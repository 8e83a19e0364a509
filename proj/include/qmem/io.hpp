#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "qmem/classical.hpp"
#include "qmem/qrf.hpp"
#include "qmem/quantum.hpp"
#include "qmem/stats.hpp"

namespace qmem::io {

using Json = nlohmann::ordered_json;

/// Malformed or inconsistent input. `field` is a JSON-pointer-like path to
/// the offending value ("" for syntax errors, which carry the line instead).
class InputError : public std::runtime_error {
 public:
  InputError(const std::string& field, const std::string& message, int line = 0);
  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  std::string field_;
  int line_;
};

/// Parse JSON text; syntax errors become InputError with line and column.
Json parse(const std::string& text, const std::string& source = "<input>");
Json read_file(const std::filesystem::path& path);

// Complex numbers are [re, im]; matrices are {rows, cols, entries} with the
// entries in row-major order.
Json to_json(Complex z);
Json to_json(const ComplexMatrix& m);
ComplexMatrix complex_matrix_from_json(const Json& j, const std::string& field);

/// {d_sys, d_env, n_times, initial_state, steps: [{kraus_ops: [...]}]}
Json to_json(const DilatedProcess& proc);
DilatedProcess circuit_from_json(const Json& j);

/// {n_times, pattern: "1011", dims: [d per measured time], probs: [...]}
/// with the earliest measured time as the slowest index.
Json to_json(const JointDistribution& dist);
JointDistribution distribution_from_json(const Json& j);

/// {n_times, outcome_dim, entries: [{pattern, probs}]}
Json to_json(const StatisticsFamily& fam);
StatisticsFamily family_from_json(const Json& j);

/// {n_times, p1: [...], steps: [{dim, entries: row-major}]}
Json to_json(const ClassicalMemorylessModel& model);
ClassicalMemorylessModel classical_model_from_json(const Json& j);

/// {d, n_times, rho1: matrix, channels: [{kraus_ops: [...]}]}
Json to_json(const MemorylessQuantumModel& model);
MemorylessQuantumModel quantum_model_from_json(const Json& j);

Json to_json(const AnalysisReport& report);
Json to_json(const CertifyReport& report, const FitConfig& cfg);

}  // namespace qmem::io
