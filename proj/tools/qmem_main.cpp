// qmem: simulate probed quantum circuits, analyze multi-time statistics and
// search for memoryless models.
//
// Exit codes: 0 success, 2 input error, 3 incomplete family,
// 4 internal invariant violation (including a failed reproduction).

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "qmem/io.hpp"
#include "qmem/paperlib.hpp"
#include "qmem/qrf.hpp"
#include "qmem/report.hpp"

namespace {

using namespace qmem;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitIncomplete = 3;
constexpr int kExitInternal = 4;

struct Options {
  std::string format = "table";
  std::optional<double> tol;
  std::string out;
  bool verbose = false;

  std::string input;
  std::string schedule;
  std::string circuit_name;
  FitConfig fit;
};

void add_common(CLI::App* cmd, Options& opt) {
  cmd->add_option("--format", opt.format, "Output format")
      ->check(CLI::IsMember({"json", "csv", "table"}))
      ->capture_default_str();
  cmd->add_option("--tol", opt.tol, "Numerical tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--out", opt.out, "Write output to PATH instead of stdout");
  cmd->add_flag("-v,--verbose", opt.verbose, "Report timing on stderr");
}

void emit(const Options& opt, const std::string& text) {
  if (opt.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(opt.out);
  if (!f) throw io::InputError("--out", "cannot write " + opt.out);
  f << text;
}

int cmd_simulate(const Options& opt) {
  const DilatedProcess proc = io::circuit_from_json(io::read_file(opt.input));
  const auto fmt = report::format_from_string(opt.format);
  if (opt.schedule.empty()) {
    emit(opt, report::render(all_pattern_statistics(proc), fmt));
    return kExitOk;
  }
  if (static_cast<int>(opt.schedule.size()) != proc.n_times()) {
    throw io::InputError("--schedule", "bitstring \"" + opt.schedule + "\" has length " +
                                           std::to_string(opt.schedule.size()) +
                                           ", circuit has n_times " +
                                           std::to_string(proc.n_times()));
  }
  std::optional<ProbeSchedule> sched;
  try {
    sched.emplace(ProbeSchedule::from_bitstring(opt.schedule));
  } catch (const std::invalid_argument& e) {
    throw io::InputError("--schedule", e.what());
  }
  emit(opt, report::render(run_schedule(proc, *sched), fmt));
  return kExitOk;
}

int cmd_analyze(const Options& opt) {
  const StatisticsFamily fam = io::family_from_json(io::read_file(opt.input));
  const AnalysisReport rep = witness_hidden_memory(fam, opt.tol.value_or(kStatsTol));
  emit(opt, report::render(rep, report::format_from_string(opt.format)));
  return kExitOk;
}

int cmd_certify(const Options& opt) {
  const StatisticsFamily fam = io::family_from_json(io::read_file(opt.input));
  const CertifyReport rep = certify(fam, opt.fit, opt.tol.value_or(kStatsTol));
  emit(opt, report::render(rep, opt.fit, report::format_from_string(opt.format)));
  return kExitOk;
}

int cmd_reproduce(const Options& opt) {
  const paperlib::Reproduction rep = paperlib::reproduce(opt.tol.value_or(1e-9));
  emit(opt, report::render(rep, report::format_from_string(opt.format)));
  return rep.pass() ? kExitOk : kExitInternal;
}

int cmd_export(const Options& opt) {
  if (opt.circuit_name != "fig2" && opt.circuit_name != "fig3") {
    throw io::InputError("circuit", "unknown circuit '" + opt.circuit_name + "' (fig2, fig3)");
  }
  emit(opt, report::render(paperlib::circuit(opt.circuit_name)));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-time statistics of probed quantum circuits"};
  app.require_subcommand(1);
  Options opt;

  auto* simulate = app.add_subcommand("simulate", "Probe a circuit; all patterns unless --schedule is given");
  simulate->add_option("circuit", opt.input, "Circuit JSON")->required();
  simulate->add_option("--schedule", opt.schedule, "Probed times as a bitstring, t1 leftmost");
  add_common(simulate, opt);

  auto* analyze = app.add_subcommand("analyze", "Markovianity, compatibility and hidden-memory witness");
  analyze->add_option("family", opt.input, "Family JSON")->required();
  add_common(analyze, opt);

  auto* cert = app.add_subcommand("certify", "Witness plus memoryless-model search");
  cert->add_option("family", opt.input, "Family JSON")->required();
  cert->add_option("--starts", opt.fit.n_starts, "Independent starts")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cert->add_option("--seed", opt.fit.seed, "Base seed")->capture_default_str();
  cert->add_option("--ancilla-dim", opt.fit.ancilla_dim, "Stinespring ancilla dimension (0: d^2)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cert->add_option("--max-iters", opt.fit.max_iters, "Simplex iterations per start")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cert->add_option("--threads", opt.fit.threads, "Worker threads for the starts")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_common(cert, opt);

  auto* repro = app.add_subcommand("reproduce", "Rebuild both reference circuits and check every table");
  add_common(repro, opt);

  auto* exp = app.add_subcommand("export-circuit", "Write a reference circuit as circuit JSON");
  exp->add_option("name", opt.circuit_name, "fig2 or fig3")->required();
  add_common(exp, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  const auto start = std::chrono::steady_clock::now();
  int rc = kExitInternal;
  try {
    if (*simulate) rc = cmd_simulate(opt);
    if (*analyze) rc = cmd_analyze(opt);
    if (*cert) rc = cmd_certify(opt);
    if (*repro) rc = cmd_reproduce(opt);
    if (*exp) rc = cmd_export(opt);
  } catch (const io::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const IncompleteFamilyError& e) {
    std::cerr << "incomplete family: " << e.what() << "\n";
    return kExitIncomplete;
  } catch (const DimensionError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  if (opt.verbose) {
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cerr << "elapsed " << report::number(s) << " s\n";
  }
  return rc;
}
