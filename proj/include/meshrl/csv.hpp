#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "meshrl/agent.hpp"
#include "meshrl/evalharness.hpp"
#include "meshrl/oracle.hpp"
#include "meshrl/sysmodel.hpp"
#include "meshrl/trace.hpp"

namespace meshrl {

// Every CSV written here starts with one comment line
//   # schema=<name>/<version> key=value ...
// followed by the column header row.

inline constexpr std::string_view kTraceColumns = "t,l1,l2,p11,p21,b1,b2,d1,d2,lc1,lc2";
inline constexpr std::string_view kResultsColumns = "scenario,environment,load_pattern,steps,anr";
inline constexpr std::string_view kReportColumns =
    "t,l1,l2,action,p11,p21,b1,b2,d1,d2,lc1,lc2,reward,optimal_reward,nr,flagged";
inline constexpr std::string_view kCurveColumns = "step,mean_reward,anr";
inline constexpr std::string_view kAccuracyColumns = "target,nmae,r2,naive_nmae";
inline constexpr std::string_view kSweepColumns = "action,p11,p21,b1,b2,d1,d2,reward";
inline constexpr std::string_view kContrastColumns =
    "t,l1,l2,first_b1,first_b2,second_b1,second_b2";

/// Shortest round-trip decimal form of a double.
std::string format_number(double v);

/// Schema comment line fields (schema, and any key=value pairs).
struct CsvHeader {
  std::string schema;
  std::vector<std::pair<std::string, std::string>> fields;

  std::string get(std::string_view key) const;
};

/// Reads just the leading comment line of a CSV file; empty schema if absent.
CsvHeader read_csv_header(const std::filesystem::path& path);

/// Writes `content` to a sibling temp file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string trace_csv(const Trace& trace, std::string_view config_hash = {});
Trace parse_trace_csv(std::istream& in);
void write_trace_csv(const std::filesystem::path& path, const Trace& trace,
                     std::string_view config_hash = {});
Trace read_trace_csv(const std::filesystem::path& path);

struct ResultRow {
  int scenario = 0;
  std::string environment;
  std::string load_pattern;
  std::size_t steps = 0;
  double anr = 0.0;
};

std::string results_csv(const std::vector<ResultRow>& rows, std::string_view config_hash = {});
std::vector<ResultRow> read_results_csv(const std::filesystem::path& path);

std::string report_csv(const EvaluationReport& report);
std::string curve_csv(const LearningCurve& curve, std::string_view objective,
                      std::string_view config_hash = {});
std::string accuracy_csv(const ModelAccuracy& acc, std::string_view config_hash = {});
std::string sweep_csv(const ActionGrid& grid, const std::vector<Delays>& delays,
                      const OracleResult& result, std::string_view objective, LoadPair loads);
std::string contrast_csv(const ContrastReport& contrast);

}  // namespace meshrl
