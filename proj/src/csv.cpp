#include "meshrl/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace meshrl {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return {buf, res.ptr};
}

namespace {

double parse_number(std::string_view s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::runtime_error("malformed number '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string header_line(std::string_view schema,
                        const std::vector<std::pair<std::string, std::string>>& fields) {
  std::string out = "# schema=";
  out += schema;
  for (const auto& [k, v] : fields) {
    if (v.empty()) continue;
    out += ' ';
    out += k;
    out += '=';
    out += v;
  }
  out += '\n';
  return out;
}

CsvHeader parse_header(std::string_view line) {
  CsvHeader h;
  if (line.substr(0, 2) != "# ") return h;
  for (auto token : split(line.substr(2), ' ')) {
    const auto eq = token.find('=');
    if (eq == std::string_view::npos) continue;
    std::string key(token.substr(0, eq)), value(token.substr(eq + 1));
    if (key == "schema")
      h.schema = value;
    else
      h.fields.emplace_back(std::move(key), std::move(value));
  }
  return h;
}

// Reads the comment line and verifies the column header row.
CsvHeader expect_header(std::istream& in, std::string_view schema, std::string_view columns) {
  std::string line;
  CsvHeader h;
  if (!std::getline(in, line)) throw std::runtime_error("empty CSV stream");
  if (line.rfind("#", 0) == 0) {
    h = parse_header(line);
    if (h.schema != schema)
      throw std::runtime_error("expected schema " + std::string(schema) + ", found '" +
                               h.schema + "'");
    if (!std::getline(in, line)) throw std::runtime_error("CSV stream lacks a header row");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != columns)
    throw std::runtime_error("unexpected CSV columns '" + line + "', expected '" +
                             std::string(columns) + "'");
  return h;
}

constexpr std::string_view kTraceSchema = "meshrl.trace/1";
constexpr std::string_view kResultsSchema = "meshrl.results/1";

}  // namespace

std::string CsvHeader::get(std::string_view key) const {
  for (const auto& [k, v] : fields)
    if (k == key) return v;
  return {};
}

CsvHeader read_csv_header(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::string line;
  if (!in || !std::getline(in, line)) return {};
  return parse_header(line);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("failed writing " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

std::string trace_csv(const Trace& trace, std::string_view config_hash) {
  std::string out = header_line(
      kTraceSchema, {{"mode", to_string(trace.meta.mode)},
                     {"seed", std::to_string(trace.meta.seed)},
                     {"steps", std::to_string(trace.meta.steps)},
                     {"repetitions", std::to_string(trace.meta.repetitions)},
                     {"cells", std::to_string(trace.meta.cells)},
                     {"config", std::string(config_hash)}});
  out += kTraceColumns;
  out += '\n';
  for (const auto& r : trace.records) {
    out += std::to_string(r.t);
    for (double v : {r.l1, r.l2, r.action.p11, r.action.p21, r.action.b1, r.action.b2, r.d1, r.d2,
                     r.lc1, r.lc2}) {
      out += ',';
      out += format_number(v);
    }
    out += '\n';
  }
  return out;
}

Trace parse_trace_csv(std::istream& in) {
  const CsvHeader h = expect_header(in, kTraceSchema, kTraceColumns);
  Trace trace;
  if (!h.schema.empty()) {
    trace.meta.mode = collection_mode_from_string(h.get("mode"));
    trace.meta.seed = std::stoull(h.get("seed"));
    trace.meta.repetitions = std::stoull(h.get("repetitions"));
    trace.meta.cells = std::stoull(h.get("cells"));
  }
  std::string line;
  std::size_t lineno = 2;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != 11)
      throw std::runtime_error("trace row " + std::to_string(lineno) + " has " +
                               std::to_string(cells.size()) + " fields, expected 11");
    EpisodeRecord r;
    r.t = static_cast<std::size_t>(parse_number(cells[0]));
    r.l1 = parse_number(cells[1]);
    r.l2 = parse_number(cells[2]);
    r.action = {parse_number(cells[3]), parse_number(cells[4]), parse_number(cells[5]),
                parse_number(cells[6])};
    r.d1 = parse_number(cells[7]);
    r.d2 = parse_number(cells[8]);
    r.lc1 = parse_number(cells[9]);
    r.lc2 = parse_number(cells[10]);
    trace.records.push_back(r);
  }
  trace.meta.steps = trace.records.size();
  return trace;
}

void write_trace_csv(const std::filesystem::path& path, const Trace& trace,
                     std::string_view config_hash) {
  write_file_atomic(path, trace_csv(trace, config_hash));
}

Trace read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace " + path.string());
  return parse_trace_csv(in);
}

std::string results_csv(const std::vector<ResultRow>& rows, std::string_view config_hash) {
  std::string out = header_line(kResultsSchema, {{"config", std::string(config_hash)}});
  out += kResultsColumns;
  out += '\n';
  char anr[32];
  for (const auto& r : rows) {
    std::snprintf(anr, sizeof(anr), "%.6f", r.anr);
    out += std::to_string(r.scenario) + ',' + r.environment + ',' + r.load_pattern + ',' +
           std::to_string(r.steps) + ',' + anr + '\n';
  }
  return out;
}

std::vector<ResultRow> read_results_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open results table " + path.string());
  expect_header(in, kResultsSchema, kResultsColumns);
  std::vector<ResultRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c = split(line);
    if (c.size() != 5) throw std::runtime_error("malformed results row '" + line + "'");
    rows.push_back({std::stoi(std::string(c[0])), std::string(c[1]), std::string(c[2]),
                    std::stoull(std::string(c[3])), parse_number(c[4])});
  }
  return rows;
}

std::string report_csv(const EvaluationReport& report) {
  std::string out = header_line(
      "meshrl.report/1", {{"scenario", std::to_string(report.scenario)},
                          {"environment", to_string(report.environment)},
                          {"load_pattern", to_string(report.load_pattern)},
                          {"reference", to_string(report.reference)},
                          {"steps", std::to_string(report.steps)},
                          {"anr", format_number(report.anr)}});
  out += kReportColumns;
  out += '\n';
  for (std::size_t i = 0; i < report.records.size(); ++i) {
    const auto& r = report.records[i];
    out += std::to_string(r.t);
    out += ',' + format_number(r.l1) + ',' + format_number(r.l2);
    out += ',' + std::to_string(report.action_indices[i]);
    for (double v : {r.action.p11, r.action.p21, r.action.b1, r.action.b2, r.d1, r.d2, r.lc1,
                     r.lc2, r.reward.value_or(NAN), r.optimal_reward.value_or(NAN),
                     report.nr_series[i]}) {
      out += ',';
      out += format_number(v);
    }
    out += report.flagged[i] ? ",1\n" : ",0\n";
  }
  return out;
}

std::string curve_csv(const LearningCurve& curve, std::string_view objective,
                      std::string_view config_hash) {
  std::string out = header_line("meshrl.curve/1", {{"objective", std::string(objective)},
                                                   {"config", std::string(config_hash)}});
  out += kCurveColumns;
  out += '\n';
  for (const auto& p : curve)
    out += std::to_string(p.step) + ',' + format_number(p.mean_reward) + ',' +
           format_number(p.anr) + '\n';
  return out;
}

std::string accuracy_csv(const ModelAccuracy& acc, std::string_view config_hash) {
  std::string out = header_line("meshrl.accuracy/1",
                                {{"samples", std::to_string(acc.samples)},
                                 {"config", std::string(config_hash)}});
  out += kAccuracyColumns;
  out += '\n';
  out += "d1," + format_number(acc.nmae_d1) + ',' + format_number(acc.r2_d1) + ',' +
         format_number(acc.naive_nmae_d1) + '\n';
  out += "d2," + format_number(acc.nmae_d2) + ',' + format_number(acc.r2_d2) + ',' +
         format_number(acc.naive_nmae_d2) + '\n';
  return out;
}

std::string sweep_csv(const ActionGrid& grid, const std::vector<Delays>& delays,
                      const OracleResult& result, std::string_view objective, LoadPair loads) {
  if (delays.size() != grid.size() || result.reward_table.size() != grid.size())
    throw std::invalid_argument("sweep needs a full reward table");
  std::string out = header_line("meshrl.sweep/1",
                                {{"objective", std::string(objective)},
                                 {"l1", format_number(loads.l1)},
                                 {"l2", format_number(loads.l2)},
                                 {"best_action", std::to_string(result.best_index)},
                                 {"best_reward", format_number(result.best_reward)}});
  out += kSweepColumns;
  out += '\n';
  for (ActionIndex i = 0; i < grid.size(); ++i) {
    const Action& a = grid[i];
    out += std::to_string(i);
    for (double v : {a.p11, a.p21, a.b1, a.b2, delays[i].d1, delays[i].d2, result.reward_table[i]}) {
      out += ',';
      out += format_number(v);
    }
    out += '\n';
  }
  return out;
}

std::string contrast_csv(const ContrastReport& c) {
  std::string out = header_line("meshrl.contrast/1", {});
  out += kContrastColumns;
  out += '\n';
  for (std::size_t t = 0; t < c.loads.size(); ++t) {
    out += std::to_string(t);
    for (double v : {c.loads[t].l1, c.loads[t].l2, c.first[t].b1, c.first[t].b2, c.second[t].b1,
                     c.second[t].b2}) {
      out += ',';
      out += format_number(v);
    }
    out += '\n';
  }
  return out;
}

}  // namespace meshrl
