#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gmmltree/bench.hpp"
#include "gmmltree/serialize.hpp"

namespace gmmltree {

inline constexpr const char* kVersion = "0.1.0";

enum class ReportFormat { csv, json };

ReportFormat parse_report_format(std::string_view text);

// Provenance written before every report: a '#'-prefixed block for CSV, a
// {"meta": {...}} first line for JSON lines.
struct ReportMeta {
  std::string command;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::vector<std::pair<std::string, std::string>> extra;
};

// FNV-1a 64 of the compact dump of `config`, as 16 hex digits.
std::string config_hash(const json& config);

// RFC-4180 field quoting.
std::string csv_field(std::string_view text);

std::string format_fixed4(double v);
std::string format_sig17(double v);

// With `timing` false, wall-clock fields are written as NA (CSV) / null
// (JSON) so the report is a pure function of its inputs.
void write_meta(std::ostream& out, ReportFormat format, const ReportMeta& meta);
void write_cv_reports(std::ostream& out, ReportFormat format, const std::vector<CvReport>& reports,
                      bool timing);
void write_speed_table(std::ostream& out, ReportFormat format, const std::vector<SpeedRow>& rows,
                       bool timing);
void write_weight_rows(std::ostream& out, ReportFormat format,
                       const std::vector<WeightImpurityRow>& rows,
                       const std::vector<std::string>& feature_names);
void write_strategy_rows(std::ostream& out, ReportFormat format,
                         const std::vector<StrategyRow>& rows,
                         const std::vector<std::string>& dataset_names);

}  // namespace gmmltree
