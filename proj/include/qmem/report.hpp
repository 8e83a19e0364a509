#pragma once

#include <string>

#include "qmem/io.hpp"
#include "qmem/paperlib.hpp"

namespace qmem::report {

enum class Format { kJson, kCsv, kTable };

Format format_from_string(const std::string& s);

/// 12 significant digits.
std::string number(double v);

/// Copy of `j` with every floating-point value rounded to 12 significant
/// digits.
io::Json rounded(const io::Json& j);

std::string render(const JointDistribution& dist, Format fmt);
std::string render(const StatisticsFamily& fam, Format fmt);
std::string render(const AnalysisReport& report, Format fmt);
std::string render(const CertifyReport& report, const FitConfig& cfg, Format fmt);
std::string render(const paperlib::Reproduction& rep, Format fmt);
/// Circuits are always emitted as JSON, unrounded so they reload exactly.
std::string render(const DilatedProcess& proc);

}  // namespace qmem::report
