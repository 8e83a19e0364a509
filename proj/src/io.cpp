#include "qmem/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

namespace qmem::io {

InputError::InputError(const std::string& field, const std::string& message, int line)
    : std::runtime_error(field.empty() ? message : field + ": " + message),
      field_(field),
      line_(line) {}

Json parse(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // Recover the line from the byte offset.
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    int line = 1;
    std::size_t last_nl = 0;
    for (std::size_t i = 0; i + 1 < upto; ++i) {
      if (text[i] == '\n') {
        ++line;
        last_nl = i + 1;
      }
    }
    std::ostringstream msg;
    msg << source << ":" << line << ":" << (upto - last_nl) << ": malformed JSON ("
        << e.what() << ")";
    throw InputError("", msg.str(), line);
  }
}

Json read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("", "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.string());
}

namespace {

std::string join(const std::string& field, const std::string& key) { return field + "/" + key; }
std::string join(const std::string& field, std::size_t i) {
  return field + "/" + std::to_string(i);
}

const Json& member(const Json& j, const std::string& field, const std::string& key) {
  if (!j.is_object()) throw InputError(field, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw InputError(join(field, key), "missing field");
  return *it;
}

const Json& array_member(const Json& j, const std::string& field, const std::string& key) {
  const Json& v = member(j, field, key);
  if (!v.is_array()) throw InputError(join(field, key), "expected an array");
  return v;
}

double as_number(const Json& j, const std::string& field) {
  if (!j.is_number()) throw InputError(field, "expected a number");
  return j.get<double>();
}

int as_count(const Json& j, const std::string& field, int min_value) {
  if (!j.is_number_integer()) throw InputError(field, "expected an integer");
  const auto v = j.get<std::int64_t>();
  if (v < min_value || v > 1 << 20) {
    throw InputError(field, "value " + std::to_string(v) + " out of range");
  }
  return static_cast<int>(v);
}

int count_member(const Json& j, const std::string& field, const std::string& key,
                 int min_value) {
  return as_count(member(j, field, key), join(field, key), min_value);
}

RealVector real_vector(const Json& arr, const std::string& field) {
  if (!arr.is_array()) throw InputError(field, "expected an array");
  RealVector v(static_cast<Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) {
    v(static_cast<Index>(i)) = as_number(arr[i], join(field, i));
  }
  return v;
}

Json real_array(const RealVector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

ProbeSchedule pattern_member(const Json& j, const std::string& field, int n_times) {
  const Json& p = member(j, field, "pattern");
  if (!p.is_string()) throw InputError(join(field, "pattern"), "expected a bitstring");
  const std::string bits = p.get<std::string>();
  if (static_cast<int>(bits.size()) != n_times) {
    throw InputError(join(field, "pattern"), "bitstring \"" + bits + "\" has length " +
                                                 std::to_string(bits.size()) + ", expected " +
                                                 std::to_string(n_times));
  }
  try {
    return ProbeSchedule::from_bitstring(bits);
  } catch (const std::exception& e) {
    throw InputError(join(field, "pattern"), e.what());
  }
}

std::vector<KrausChannel> channels_from_json(const Json& arr, const std::string& field) {
  std::vector<KrausChannel> out;
  for (std::size_t k = 0; k < arr.size(); ++k) {
    const std::string f = join(field, k);
    const Json& ops = array_member(arr[k], f, "kraus_ops");
    if (ops.empty()) throw InputError(join(f, "kraus_ops"), "empty Kraus set");
    std::vector<ComplexMatrix> mats;
    for (std::size_t l = 0; l < ops.size(); ++l) {
      mats.push_back(complex_matrix_from_json(ops[l], join(join(f, "kraus_ops"), l)));
    }
    try {
      out.emplace_back(std::move(mats));
    } catch (const std::exception& e) {
      throw InputError(f, e.what());
    }
  }
  return out;
}

Json channel_json(const KrausChannel& ch) {
  Json ops = Json::array();
  for (const auto& k : ch.kraus_ops()) ops.push_back(to_json(k));
  return Json{{"kraus_ops", std::move(ops)}};
}

Json history_json(const std::vector<TimedOutcome>& h) {
  Json out = Json::array();
  for (const auto& [t, x] : h) out.push_back(Json{{"time", t + 1}, {"outcome", x}});
  return out;
}

std::string bits(int n_times, std::uint32_t mask) {
  return ProbeSchedule(n_times, mask).bitstring();
}

Json skipped_json(const std::vector<SkippedComparison>& skipped, int n_times) {
  Json out = Json::array();
  for (const auto& s : skipped) {
    out.push_back(Json{{"check", s.check},
                       {"pattern", bits(n_times, s.pattern)},
                       {"target_time", s.target_time + 1},
                       {"history", history_json(s.history)}});
  }
  return out;
}

// Times are reported 1-based to match the t_1..t_n naming.
Json markov_check_json(const MarkovCheck& check, int n_times) {
  Json j{{"ok", check.ok}, {"worst", check.worst}};
  if (check.site) {
    const auto& v = *check.site;
    j["site"] = Json{{"pattern", bits(n_times, v.pattern)},
                     {"target_time", v.target_time + 1},
                     {"x_target", v.x_target},
                     {"history_a", history_json(v.history_a)},
                     {"conditional_a", v.conditional_a},
                     {"history_b", history_json(v.history_b)},
                     {"conditional_b", v.conditional_b}};
  } else {
    j["site"] = nullptr;
  }
  Json per = Json::array();
  for (const auto& p : check.per_pattern) {
    per.push_back(Json{{"pattern", bits(n_times, p.pattern)}, {"worst", p.worst}});
  }
  j["per_pattern"] = std::move(per);
  j["skipped"] = skipped_json(check.skipped, n_times);
  return j;
}

Json compatibility_json(const CompatibilityCheck& check, int n_times) {
  Json j{{"ok", check.ok}, {"worst", check.worst}};
  if (check.site) {
    const auto& v = *check.site;
    j["site"] = Json{{"earlier_time", v.earlier_time + 1}, {"later_time", v.later_time + 1},
                     {"x_earlier", v.x_earlier},           {"x_later", v.x_later},
                     {"pattern_a", bits(n_times, v.pattern_a)},
                     {"conditional_a", v.conditional_a},
                     {"pattern_b", bits(n_times, v.pattern_b)},
                     {"conditional_b", v.conditional_b}};
  } else {
    j["site"] = nullptr;
  }
  j["skipped"] = skipped_json(check.skipped, n_times);
  return j;
}

Json consistency_json(const ConsistencyCheck& check, int n_times) {
  Json j{{"ok", check.ok}, {"worst", check.worst}};
  if (check.worst_pattern) {
    j["worst_pattern"] = bits(n_times, *check.worst_pattern);
  } else {
    j["worst_pattern"] = nullptr;
  }
  return j;
}

}  // namespace

Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const ComplexMatrix& m) {
  Json entries = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) entries.push_back(to_json(m(r, c)));
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"entries", std::move(entries)}};
}

ComplexMatrix complex_matrix_from_json(const Json& j, const std::string& field) {
  const int rows = count_member(j, field, "rows", 1);
  const int cols = count_member(j, field, "cols", 1);
  const Json& entries = array_member(j, field, "entries");
  const std::string ef = join(field, "entries");
  if (entries.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
    throw InputError(ef, "has " + std::to_string(entries.size()) + " entries, expected " +
                             std::to_string(rows * cols));
  }
  ComplexMatrix m(rows, cols);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const Json& z = entries[i];
    const std::string zf = join(ef, i);
    if (z.is_number()) {
      m(static_cast<Index>(i) / cols, static_cast<Index>(i) % cols) = as_number(z, zf);
      continue;
    }
    if (!z.is_array() || z.size() != 2) throw InputError(zf, "expected [re, im]");
    m(static_cast<Index>(i) / cols, static_cast<Index>(i) % cols) =
        Complex(as_number(z[0], join(zf, 0)), as_number(z[1], join(zf, 1)));
  }
  return m;
}

Json to_json(const DilatedProcess& proc) {
  Json steps = Json::array();
  for (const auto& s : proc.steps()) steps.push_back(channel_json(s));
  return Json{{"d_sys", proc.d_sys()},
              {"d_env", proc.d_env()},
              {"n_times", proc.n_times()},
              {"initial_state", to_json(proc.initial_state().matrix())},
              {"steps", std::move(steps)}};
}

DilatedProcess circuit_from_json(const Json& j) {
  const std::string root;
  const int d_sys = count_member(j, root, "d_sys", 1);
  const int d_env = count_member(j, root, "d_env", 1);
  const int n_times = count_member(j, root, "n_times", 1);
  const Json& steps = array_member(j, root, "steps");
  if (static_cast<int>(steps.size()) != n_times - 1) {
    throw InputError("/steps", "has " + std::to_string(steps.size()) + " steps, expected n_times - 1 = " +
                                   std::to_string(n_times - 1));
  }
  ComplexMatrix init = complex_matrix_from_json(member(j, root, "initial_state"), "/initial_state");
  std::optional<DensityOperator> rho;
  try {
    rho.emplace(std::move(init));
  } catch (const std::exception& e) {
    throw InputError("/initial_state", e.what());
  }
  auto channels = channels_from_json(steps, "/steps");
  try {
    return DilatedProcess(d_sys, d_env, std::move(*rho), std::move(channels));
  } catch (const std::exception& e) {
    throw InputError("", e.what());
  }
}

Json to_json(const JointDistribution& dist) {
  Json dims = Json::array();
  for (std::size_t i = 0; i < dist.measured_times().size(); ++i) dims.push_back(dist.outcome_dim());
  return Json{{"n_times", dist.n_times()},
              {"pattern", dist.pattern().bitstring()},
              {"outcome_dim", dist.outcome_dim()},
              {"dims", std::move(dims)},
              {"probs", real_array(dist.probs())}};
}

namespace {

JointDistribution distribution_entry(const Json& j, const std::string& field, int n_times,
                                     int outcome_dim) {
  ProbeSchedule pattern = pattern_member(j, field, n_times);
  RealVector probs = real_vector(member(j, field, "probs"), join(field, "probs"));
  if (probs.size() > 0 && probs.minCoeff() < -kStatsTol) {
    throw InputError(join(field, "probs"), "negative probability");
  }
  if (std::abs(probs.sum() - 1.0) > kStatsTol) {
    throw InputError(join(field, "probs"), "probabilities sum to " + std::to_string(probs.sum()));
  }
  try {
    return JointDistribution(pattern, outcome_dim, std::move(probs));
  } catch (const std::exception& e) {
    throw InputError(join(field, "probs"), e.what());
  }
}

}  // namespace

JointDistribution distribution_from_json(const Json& j) {
  const int n_times = count_member(j, "", "n_times", 1);
  int d = 0;
  if (j.contains("outcome_dim")) d = count_member(j, "", "outcome_dim", 1);
  if (j.contains("dims")) {
    const Json& dims = array_member(j, "", "dims");
    for (std::size_t i = 0; i < dims.size(); ++i) {
      const int di = as_count(dims[i], join("/dims", i), 1);
      if (d == 0) d = di;
      if (di != d) throw InputError(join("/dims", i), "all measured times must share one dimension");
    }
  }
  if (d == 0) throw InputError("/outcome_dim", "missing field");
  return distribution_entry(j, "", n_times, d);
}

Json to_json(const StatisticsFamily& fam) {
  Json entries = Json::array();
  for (const auto& [mask, dist] : fam.entries()) {
    entries.push_back(Json{{"pattern", dist.pattern().bitstring()}, {"probs", real_array(dist.probs())}});
  }
  return Json{{"n_times", fam.n_times()},
              {"outcome_dim", fam.outcome_dim()},
              {"entries", std::move(entries)}};
}

StatisticsFamily family_from_json(const Json& j) {
  const int n_times = count_member(j, "", "n_times", 1);
  const int d = count_member(j, "", "outcome_dim", 1);
  if (n_times > kMaxTimes) {
    throw InputError("/n_times", "at most " + std::to_string(kMaxTimes) + " times supported");
  }
  StatisticsFamily fam(n_times, d);
  const Json& entries = array_member(j, "", "entries");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string f = join("/entries", i);
    JointDistribution dist = distribution_entry(entries[i], f, n_times, d);
    if (fam.contains(dist.pattern().mask())) throw InputError(join(f, "pattern"), "duplicate pattern");
    fam.insert(std::move(dist));
  }
  return fam;
}

Json to_json(const ClassicalMemorylessModel& model) {
  Json steps = Json::array();
  for (const auto& s : model.steps()) {
    Json entries = Json::array();
    for (Index r = 0; r < s.dim(); ++r) {
      for (Index c = 0; c < s.dim(); ++c) entries.push_back(s(r, c));
    }
    steps.push_back(Json{{"dim", s.dim()}, {"entries", std::move(entries)}});
  }
  return Json{{"n_times", model.n_times()}, {"p1", real_array(model.p1())}, {"steps", std::move(steps)}};
}

ClassicalMemorylessModel classical_model_from_json(const Json& j) {
  const int n_times = count_member(j, "", "n_times", 1);
  RealVector p1 = real_vector(member(j, "", "p1"), "/p1");
  const Json& steps = array_member(j, "", "steps");
  if (static_cast<int>(steps.size()) != n_times - 1) {
    throw InputError("/steps", "expected n_times - 1 steps");
  }
  std::vector<StochasticMatrix> mats;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    const std::string f = join("/steps", k);
    const int dim = count_member(steps[k], f, "dim", 1);
    RealVector flat = real_vector(member(steps[k], f, "entries"), join(f, "entries"));
    if (flat.size() != static_cast<Index>(dim) * dim) throw InputError(join(f, "entries"), "expected dim^2 entries");
    RealMatrix m(dim, dim);
    for (int r = 0; r < dim; ++r) {
      for (int c = 0; c < dim; ++c) m(r, c) = flat(r * dim + c);
    }
    try {
      mats.emplace_back(std::move(m));
    } catch (const std::exception& e) {
      throw InputError(f, e.what());
    }
  }
  try {
    return ClassicalMemorylessModel(std::move(p1), std::move(mats));
  } catch (const std::exception& e) {
    throw InputError("", e.what());
  }
}

Json to_json(const MemorylessQuantumModel& model) {
  Json channels = Json::array();
  for (const auto& ch : model.channels()) channels.push_back(channel_json(ch));
  return Json{{"d", model.dim()},
              {"n_times", model.n_times()},
              {"rho1", to_json(model.rho1().matrix())},
              {"channels", std::move(channels)}};
}

MemorylessQuantumModel quantum_model_from_json(const Json& j) {
  const int n_times = count_member(j, "", "n_times", 1);
  ComplexMatrix rho = complex_matrix_from_json(member(j, "", "rho1"), "/rho1");
  const Json& channels = array_member(j, "", "channels");
  if (static_cast<int>(channels.size()) != n_times - 1) {
    throw InputError("/channels", "expected n_times - 1 channels");
  }
  std::optional<DensityOperator> rho1;
  try {
    rho1.emplace(std::move(rho));
  } catch (const std::exception& e) {
    throw InputError("/rho1", e.what());
  }
  auto chs = channels_from_json(channels, "/channels");
  try {
    return MemorylessQuantumModel(std::move(*rho1), std::move(chs));
  } catch (const std::exception& e) {
    throw InputError("", e.what());
  }
}

Json to_json(const AnalysisReport& report) {
  const int n = report.n_times;
  return Json{{"verdict", to_string(report.verdict)},
              {"tol", report.tol},
              {"markov_full", markov_check_json(report.markov_full, n)},
              {"markov_sub", markov_check_json(report.markov_sub, n)},
              {"compatible", compatibility_json(report.compatible, n)},
              {"kolmogorov", consistency_json(report.kolmogorov, n)}};
}

Json to_json(const CertifyReport& report, const FitConfig& cfg) {
  Json losses = Json::array();
  for (double l : report.fit.per_start_losses) losses.push_back(l);
  return Json{{"conclusion", to_string(report.conclusion)},
              {"verdict", to_string(report.witness.verdict)},
              {"residual", report.fit.residual},
              {"best_start", report.fit.best_start},
              {"config",
               Json{{"n_starts", cfg.n_starts},
                    {"max_iters", cfg.max_iters},
                    {"seed", cfg.seed},
                    {"ancilla_dim", cfg.ancilla_dim},
                    {"convergence_tol", cfg.convergence_tol},
                    {"loss_floor", cfg.loss_floor}}},
              {"per_start_losses", std::move(losses)},
              {"witness", to_json(report.witness)},
              {"best_model", to_json(report.fit.model)}};
}

}  // namespace qmem::io
