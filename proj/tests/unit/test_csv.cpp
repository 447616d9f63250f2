#include <stdexcept>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "meshrl/csv.hpp"
#include "meshrl/ground_truth.hpp"

using namespace meshrl;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "meshrl-csv-test";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_SUITE("csv") {

TEST_CASE("numbers round-trip through their text form") {
  for (double v : {0.0, 0.1, 1.0 / 3.0, 2.5e-7, 12345.678, 0.065}) {
    CHECK(std::stod(format_number(v)) == v);
  }
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(20.0) == "20");
}

TEST_CASE("trace CSV round-trips bit for bit") {
  const Trace t = collect_trace_random(GroundTruthParams{}, 200, 4);
  const std::string text = trace_csv(t, "abc123");
  CHECK(text.rfind("# schema=meshrl.trace/1", 0) == 0);
  std::istringstream in(text);
  const Trace back = parse_trace_csv(in);
  REQUIRE(back.size() == t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(back.records[i].action == t.records[i].action);
    CHECK(back.records[i].d1 == t.records[i].d1);
    CHECK(back.records[i].d2 == t.records[i].d2);
    CHECK(back.records[i].lc1 == t.records[i].lc1);
    CHECK(back.records[i].l2 == t.records[i].l2);
  }
  CHECK(back.meta.seed == t.meta.seed);
  CHECK(trace_csv(back, "abc123") == text);

  const auto path = scratch("trace.csv");
  write_trace_csv(path, t, "abc123");
  CHECK(read_csv_header(path).get("config") == "abc123");
  CHECK(read_trace_csv(path).size() == t.size());
}

TEST_CASE("trace CSV without a comment line still parses") {
  std::istringstream in(std::string(kTraceColumns) + "\n0,5,10,0,1,0,0.2,0.03,0.04,5,8\n");
  const Trace t = parse_trace_csv(in);
  REQUIRE(t.size() == 1);
  CHECK(t.records[0].action.b2 == 0.2);
  CHECK(t.records[0].lc2 == 8.0);
}

TEST_CASE("malformed CSV input is rejected") {
  std::istringstream empty("");
  CHECK_THROWS(parse_trace_csv(empty));
  std::istringstream wrong_cols("t,l1,l2\n1,2,3\n");
  CHECK_THROWS(parse_trace_csv(wrong_cols));
  std::istringstream short_row(std::string(kTraceColumns) + "\n0,5,10\n");
  CHECK_THROWS(parse_trace_csv(short_row));
  std::istringstream bad_number(std::string(kTraceColumns) + "\n0,5,x,0,1,0,0.2,0.03,0.04,5,8\n");
  CHECK_THROWS(parse_trace_csv(bad_number));
  std::istringstream wrong_schema("# schema=meshrl.results/1\n" + std::string(kTraceColumns) +
                                  "\n");
  CHECK_THROWS(parse_trace_csv(wrong_schema));
}

TEST_CASE("results CSV has the fixed schema and round-trips") {
  const std::vector<ResultRow> rows{{1, "simulation", "random", 150, 0.912345678},
                                    {2, "ground-truth", "sinusoidal", 400, 0.8}};
  const std::string text = results_csv(rows, "feed");
  std::istringstream in(text);
  std::string comment, header;
  std::getline(in, comment);
  std::getline(in, header);
  CHECK(comment.find("config=feed") != std::string::npos);
  CHECK(header == kResultsColumns);

  const auto path = scratch("results.csv");
  write_file_atomic(path, text);
  const auto back = read_results_csv(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0].scenario == 1);
  CHECK(back[0].environment == "simulation");
  CHECK(back[0].anr == doctest::Approx(0.912346).epsilon(1e-9));
  CHECK(back[1].load_pattern == "sinusoidal");
  CHECK(back[1].steps == 400);

  write_file_atomic(path, "# schema=meshrl.results/1\n" + std::string(kResultsColumns) +
                              "\n1,simulation\n");
  CHECK_THROWS(read_results_csv(path));
  CHECK_THROWS(read_results_csv(scratch("missing.csv")));
}

TEST_CASE("curve and accuracy tables carry their columns") {
  const LearningCurve curve{{1024, 5.5, 0.7}, {2048, 6.0, 0.8}};
  const std::string c = curve_csv(curve, "MO1", "hash");
  CHECK(c.find(std::string(kCurveColumns)) != std::string::npos);
  CHECK(c.find("2048,6,0.8") != std::string::npos);
  ModelAccuracy acc;
  acc.nmae_d1 = 0.1;
  const std::string a = accuracy_csv(acc);
  CHECK(a.find(std::string(kAccuracyColumns)) != std::string::npos);
}

TEST_CASE("atomic writes leave no temp file behind") {
  const auto path = scratch("atomic.txt");
  write_file_atomic(path, "one");
  write_file_atomic(path, "two");
  std::ifstream in(path);
  std::string s;
  std::getline(in, s);
  CHECK(s == "two");
  for (const auto& e : fs::directory_iterator(path.parent_path()))
    CHECK(e.path().filename().string().find(".tmp") == std::string::npos);
}

}
