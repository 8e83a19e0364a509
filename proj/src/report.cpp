#include "qmem/report.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace qmem::report {

Format format_from_string(const std::string& s) {
  if (s == "json") return Format::kJson;
  if (s == "csv") return Format::kCsv;
  if (s == "table") return Format::kTable;
  throw std::invalid_argument("unknown format '" + s + "' (json, csv, table)");
}

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

io::Json rounded(const io::Json& j) {
  if (j.is_number_float()) return std::stod(number(j.get<double>()));
  if (j.is_array() || j.is_object()) {
    io::Json out = j;
    for (auto it = out.begin(); it != out.end(); ++it) *it = rounded(*it);
    return out;
  }
  return j;
}

namespace {

std::string dump(const io::Json& j) { return rounded(j).dump(2) + "\n"; }

std::string pass_fail(bool ok) { return ok ? "PASS" : "FAIL"; }

std::string fraction(const paperlib::Rational& r) {
  if (r.num == 0) return "0";
  if (r.den == 1) return std::to_string(r.num);
  return std::to_string(r.num) + "/" + std::to_string(r.den);
}

std::string time_list(int n, std::uint32_t mask) {
  std::string out;
  for (int t = 0; t < n; ++t) {
    if (!out.empty()) out += ",";
    out += (mask >> t) & 1u ? "x" + std::to_string(t + 1) : "I" + std::to_string(t + 1);
  }
  return out;
}

// One row per outcome tuple; unprobed times print as "I".
void outcome_cells(const JointDistribution& dist, Index flat, std::vector<std::string>& cells) {
  const auto xs = dist.outcomes_of(flat);
  std::size_t k = 0;
  for (int t = 0; t < dist.n_times(); ++t) {
    cells.push_back(dist.pattern().measures(t) ? std::to_string(xs[k++]) : "I");
  }
}

std::string ordering_note(const JointDistribution& dist) {
  const auto& times = dist.measured_times();
  if (times.empty()) return "# single outcome (nothing probed)";
  return "# rows ordered with x" + std::to_string(times.front() + 1) + " slowest, x" +
         std::to_string(times.back() + 1) + " fastest";
}

void csv_rows(const JointDistribution& dist, bool with_pattern, std::ostringstream& out) {
  for (Index flat = 0; flat < dist.size(); ++flat) {
    std::vector<std::string> cells;
    if (with_pattern) cells.push_back(dist.pattern().bitstring());
    outcome_cells(dist, flat, cells);
    cells.push_back(number(dist.probs()(flat)));
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << "\n";
  }
}

std::string time_header(int n) {
  std::string h;
  for (int t = 0; t < n; ++t) h += (t ? ",x" : "x") + std::to_string(t + 1);
  return h;
}

void table_rows(const JointDistribution& dist, std::ostringstream& out) {
  for (Index flat = 0; flat < dist.size(); ++flat) {
    std::vector<std::string> cells;
    outcome_cells(dist, flat, cells);
    out << " ";
    for (const auto& c : cells) out << " " << c;
    out << "  " << number(dist.probs()(flat)) << "\n";
  }
}

std::string history(const std::vector<TimedOutcome>& h) {
  std::string out;
  for (const auto& [t, x] : h) {
    if (!out.empty()) out += ",";
    out += "x" + std::to_string(t + 1) + "=" + std::to_string(x);
  }
  return out;
}

std::string markov_site(const MarkovCheck& c, int n) {
  if (!c.site) return "";
  const auto& v = *c.site;
  return "pattern " + ProbeSchedule(n, v.pattern).bitstring() + ": P(x" +
         std::to_string(v.target_time + 1) + "=" + std::to_string(v.x_target) + "|" +
         history(v.history_a) + ")=" + number(v.conditional_a) + " vs |" + history(v.history_b) +
         ")=" + number(v.conditional_b);
}

std::string compat_site(const CompatibilityCheck& c, int n) {
  if (!c.site) return "";
  const auto& v = *c.site;
  const std::string cond = "P(x" + std::to_string(v.later_time + 1) + "=" +
                           std::to_string(v.x_later) + "|x" + std::to_string(v.earlier_time + 1) +
                           "=" + std::to_string(v.x_earlier) + ")";
  return cond + " is " + number(v.conditional_a) + " under " +
         ProbeSchedule(n, v.pattern_a).bitstring() + " and " + number(v.conditional_b) +
         " under " + ProbeSchedule(n, v.pattern_b).bitstring();
}

std::string kolmogorov_site(const ConsistencyCheck& c, int n) {
  if (!c.worst_pattern) return "";
  return "pattern " + ProbeSchedule(n, *c.worst_pattern).bitstring();
}

}  // namespace

std::string render(const JointDistribution& dist, Format fmt) {
  std::ostringstream out;
  switch (fmt) {
    case Format::kJson:
      return dump(io::to_json(dist));
    case Format::kCsv:
      out << ordering_note(dist) << "\n" << time_header(dist.n_times()) << ",probability\n";
      csv_rows(dist, false, out);
      break;
    case Format::kTable:
      out << "pattern " << dist.pattern().bitstring() << "  P(" << time_list(dist.n_times(), dist.pattern().mask())
          << ")\n"
          << ordering_note(dist) << "\n";
      table_rows(dist, out);
      break;
  }
  return out.str();
}

std::string render(const StatisticsFamily& fam, Format fmt) {
  std::ostringstream out;
  switch (fmt) {
    case Format::kJson:
      return dump(io::to_json(fam));
    case Format::kCsv:
      out << "# per pattern, rows ordered with the earliest probed time slowest\n"
          << "pattern," << time_header(fam.n_times()) << ",probability\n";
      for (const auto& [mask, dist] : fam.entries()) csv_rows(dist, true, out);
      break;
    case Format::kTable:
      for (const auto& [mask, dist] : fam.entries()) {
        out << render(dist, Format::kTable) << "\n";
      }
      break;
  }
  return out.str();
}

std::string render(const AnalysisReport& report, Format fmt) {
  const int n = report.n_times;
  std::ostringstream out;
  struct Row {
    std::string check;
    bool ok;
    double worst;
    std::string site;
  };
  const Row rows[] = {
      {"markov_full", report.markov_full.ok, report.markov_full.worst, markov_site(report.markov_full, n)},
      {"markov_sub", report.markov_sub.ok, report.markov_sub.worst, markov_site(report.markov_sub, n)},
      {"compatible", report.compatible.ok, report.compatible.worst, compat_site(report.compatible, n)},
      {"kolmogorov", report.kolmogorov.ok, report.kolmogorov.worst, kolmogorov_site(report.kolmogorov, n)},
  };
  switch (fmt) {
    case Format::kJson:
      return dump(io::to_json(report));
    case Format::kCsv:
      out << "check,ok,worst,site\n";
      for (const auto& r : rows) {
        out << r.check << "," << (r.ok ? "true" : "false") << "," << number(r.worst) << ",\""
            << r.site << "\"\n";
      }
      out << "verdict,,,\"" << to_string(report.verdict) << "\"\n";
      break;
    case Format::kTable:
      out << "verdict: " << to_string(report.verdict) << "  (tol " << number(report.tol) << ")\n";
      for (const auto& r : rows) {
        char line[64];
        std::snprintf(line, sizeof line, "  %-12s %-4s worst %-20s", r.check.c_str(),
                      pass_fail(r.ok).c_str(), number(r.worst).c_str());
        out << line << r.site << "\n";
      }
      break;
  }
  return out.str();
}

std::string render(const CertifyReport& report, const FitConfig& cfg, Format fmt) {
  std::ostringstream out;
  const auto& losses = report.fit.per_start_losses;
  switch (fmt) {
    case Format::kJson:
      return dump(io::to_json(report, cfg));
    case Format::kCsv:
      out << "# conclusion " << to_string(report.conclusion) << ", verdict "
          << to_string(report.witness.verdict) << ", residual " << number(report.fit.residual)
          << ", best start " << report.fit.best_start << "\n"
          << "start,loss\n";
      for (std::size_t i = 0; i < losses.size(); ++i) out << i << "," << number(losses[i]) << "\n";
      break;
    case Format::kTable:
      out << "conclusion: " << to_string(report.conclusion) << "\n"
          << "verdict:    " << to_string(report.witness.verdict) << "\n"
          << "residual:   " << number(report.fit.residual) << " (best start "
          << report.fit.best_start << " of " << losses.size() << ", seed " << cfg.seed << ")\n"
          << "per-start losses:\n";
      for (std::size_t i = 0; i < losses.size(); ++i) {
        out << "  " << i << "  " << number(losses[i]) << "\n";
      }
      break;
  }
  return out.str();
}

std::string render(const paperlib::Reproduction& rep, Format fmt) {
  using paperlib::TableKind;
  std::ostringstream out;
  if (fmt == Format::kJson) {
    io::Json tables = io::Json::array();
    for (const auto& t : rep.tables) {
      io::Json rows = io::Json::array();
      for (std::size_t i = 0; i < t.computed.size(); ++i) {
        rows.push_back(io::Json{{"outcomes", t.outcomes[i]},
                                {"expected", fraction(t.table.expected[i])},
                                {"computed", t.computed[i]}});
      }
      tables.push_back(io::Json{{"label", t.table.label},
                                {"circuit", t.table.circuit},
                                {"pattern", t.table.pattern},
                                {"kind", t.table.kind == TableKind::kJoint ? "joint" : "conditional"},
                                {"provenance", t.table.provenance},
                                {"max_error", t.max_error},
                                {"pass", t.pass},
                                {"rows", std::move(rows)}});
    }
    io::Json states = io::Json::array();
    for (const auto& s : rep.states) {
      states.push_back(io::Json{{"label", s.annotation.label},
                                {"circuit", s.annotation.circuit},
                                {"pattern", s.annotation.pattern},
                                {"time", s.annotation.time + 1},
                                {"earlier_outcomes", s.annotation.earlier_outcomes},
                                {"reached", s.reached},
                                {"max_error", s.max_error},
                                {"pass", s.pass}});
    }
    io::Json witnesses = io::Json::array();
    for (const auto& w : rep.witnesses) {
      witnesses.push_back(io::Json{{"circuit", w.circuit},
                                   {"expected", to_string(w.expected)},
                                   {"verdict", to_string(w.report.verdict)},
                                   {"pass", w.pass},
                                   {"report", io::to_json(w.report)}});
    }
    return dump(io::Json{{"tol", rep.tol},
                         {"pass", rep.pass()},
                         {"tables", std::move(tables)},
                         {"states", std::move(states)},
                         {"witnesses", std::move(witnesses)}});
  }

  if (fmt == Format::kCsv) {
    out << "section,circuit,pattern,label,result,max_error\n";
    for (const auto& t : rep.tables) {
      out << "table," << t.table.circuit << "," << t.table.pattern << ",\"" << t.table.label
          << "\"," << pass_fail(t.pass) << "," << number(t.max_error) << "\n";
    }
    for (const auto& s : rep.states) {
      out << "state," << s.annotation.circuit << "," << s.annotation.pattern << ",\""
          << s.annotation.label << "\"," << pass_fail(s.pass) << "," << number(s.max_error) << "\n";
    }
    for (const auto& w : rep.witnesses) {
      out << "witness," << w.circuit << ",,\"" << to_string(w.report.verdict) << "\","
          << pass_fail(w.pass) << ",\n";
    }
    return out.str();
  }

  for (const auto& t : rep.tables) {
    out << "[" << pass_fail(t.pass) << "] " << t.table.circuit << " " << t.table.pattern << "  "
        << t.table.label << "  max error " << number(t.max_error) << "\n";
    for (std::size_t i = 0; i < t.computed.size(); ++i) {
      std::string xs;
      for (int x : t.outcomes[i]) xs += std::to_string(x);
      char line[96];
      std::snprintf(line, sizeof line, "    %-6s expected %-6s computed %s", xs.c_str(),
                    fraction(t.table.expected[i]).c_str(), number(t.computed[i]).c_str());
      out << line << "\n";
    }
  }
  for (const auto& s : rep.states) {
    std::string xs;
    for (int x : s.annotation.earlier_outcomes) xs += std::to_string(x);
    out << "[" << pass_fail(s.pass) << "] " << s.annotation.circuit << " " << s.annotation.pattern
        << "  state " << s.annotation.label << " before t" << s.annotation.time + 1
        << (xs.empty() ? "" : " after outcomes " + xs) << "  max error " << number(s.max_error)
        << (s.reached ? "" : "  (branch not reached)") << "\n";
  }
  for (const auto& w : rep.witnesses) {
    out << "[" << pass_fail(w.pass) << "] " << w.circuit << "  witness "
        << to_string(w.report.verdict) << " (expected " << to_string(w.expected) << ")\n";
  }
  out << (rep.pass() ? "ALL PASS" : "FAILURES") << " (tol " << number(rep.tol) << ")\n";
  return out.str();
}

std::string render(const DilatedProcess& proc) { return io::to_json(proc).dump(2) + "\n"; }

}  // namespace qmem::report
