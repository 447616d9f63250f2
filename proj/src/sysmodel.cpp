#include "meshrl/sysmodel.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace meshrl {

SystemModel::SystemModel(RegressionForest forest, std::array<Range, kFeatures> feature_ranges,
                         std::array<Range, kTargets> target_ranges, Delays target_mean)
    : forest_(std::move(forest)),
      feature_ranges_(feature_ranges),
      target_ranges_(target_ranges),
      target_mean_(target_mean) {
  if (forest_.num_features() != kFeatures || forest_.num_targets() != kTargets)
    throw std::invalid_argument("surrogate forest must map 6 features to 2 targets");
}

Delays SystemModel::predict(double l1, double l2, double p11, double p21, double b1,
                            double b2) const {
  if (forest_.size() == 0) throw std::logic_error("system model is not fitted");
  const std::array<double, kFeatures> x{l1, l2, p11, p21, b1, b2};
  std::array<double, kTargets> y{};
  forest_.predict(x, y);
  return {y[0], y[1]};
}

std::array<double, SystemModel::kFeatures> features_of(const EpisodeRecord& r) {
  return {r.l1, r.l2, r.action.p11, r.action.p21, r.action.b1, r.action.b2};
}

Dataset to_dataset(const Trace& trace) {
  Dataset data(SystemModel::kFeatures, SystemModel::kTargets);
  data.features.reserve(trace.size() * SystemModel::kFeatures);
  data.targets.reserve(trace.size() * SystemModel::kTargets);
  for (const auto& rec : trace.records) {
    const auto x = features_of(rec);
    const std::array<double, 2> y{rec.d1, rec.d2};
    data.add_row(x, y);
  }
  return data;
}

SystemModel fit_system_model(const Trace& training, const SurrogateOptions& options) {
  if (training.size() < kMinFitRecords)
    throw std::invalid_argument("surrogate fit needs at least " + std::to_string(kMinFitRecords) +
                                " records, got " + std::to_string(training.size()));
  const Dataset data = to_dataset(training);

  std::array<Range, SystemModel::kFeatures> fr;
  std::array<Range, SystemModel::kTargets> tr;
  fr.fill({std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()});
  tr = {fr[0], fr[0]};
  std::array<double, 2> sum{};
  for (std::size_t r = 0; r < data.rows(); ++r) {
    const auto x = data.row(r);
    for (std::size_t f = 0; f < SystemModel::kFeatures; ++f) {
      fr[f].lo = std::min(fr[f].lo, x[f]);
      fr[f].hi = std::max(fr[f].hi, x[f]);
    }
    const auto y = data.target(r);
    for (std::size_t t = 0; t < SystemModel::kTargets; ++t) {
      tr[t].lo = std::min(tr[t].lo, y[t]);
      tr[t].hi = std::max(tr[t].hi, y[t]);
      sum[t] += y[t];
    }
  }
  const double n = static_cast<double>(data.rows());
  return SystemModel(RegressionForest::fit(data, options.forest_options()), fr, tr,
                     {sum[0] / n, sum[1] / n});
}

ModelAccuracy evaluate_predictions(std::span<const Delays> predicted,
                                   std::span<const Delays> truth, Delays naive) {
  if (truth.empty()) throw std::invalid_argument("cannot evaluate on an empty test set");
  if (predicted.size() != truth.size())
    throw std::invalid_argument("prediction/truth length mismatch");
  const double n = static_cast<double>(truth.size());

  auto score = [&](auto get, double naive_value, double& nmae, double& r2, double& naive_nmae) {
    double mean = 0.0;
    for (const auto& y : truth) mean += get(y);
    mean /= n;
    double abs_err = 0.0, naive_abs = 0.0, sse = 0.0, sst = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      const double y = get(truth[i]);
      const double e = get(predicted[i]) - y;
      abs_err += std::abs(e);
      naive_abs += std::abs(naive_value - y);
      sse += e * e;
      sst += (y - mean) * (y - mean);
    }
    nmae = abs_err / n / mean;
    naive_nmae = naive_abs / n / mean;
    r2 = sst > 0.0 ? 1.0 - sse / sst : (sse == 0.0 ? 1.0 : -std::numeric_limits<double>::infinity());
  };

  ModelAccuracy acc;
  acc.samples = truth.size();
  score([](const Delays& d) { return d.d1; }, naive.d1, acc.nmae_d1, acc.r2_d1, acc.naive_nmae_d1);
  score([](const Delays& d) { return d.d2; }, naive.d2, acc.nmae_d2, acc.r2_d2, acc.naive_nmae_d2);
  return acc;
}

ModelAccuracy evaluate_model(const SystemModel& model, const Trace& test) {
  if (test.records.empty()) throw std::invalid_argument("cannot evaluate on an empty test set");
  std::vector<Delays> predicted, truth;
  predicted.reserve(test.size());
  truth.reserve(test.size());
  for (const auto& rec : test.records) {
    predicted.push_back(model.predict({rec.l1, rec.l2}, rec.action));
    truth.push_back({rec.d1, rec.d2});
  }
  return evaluate_predictions(predicted, truth, model.target_mean());
}

namespace {

constexpr char kModelMagic[16] = {'M', 'E', 'S', 'H', 'R', 'L', '-', 'S',
                                  'Y', 'S', 'M', 'O', 'D', 'E', 'L', '\n'};
constexpr std::uint32_t kModelVersion = 1;

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("truncated system model stream");
  return v;
}

}  // namespace

void SystemModel::write(std::ostream& out) const {
  out.write(kModelMagic, sizeof(kModelMagic));
  put(out, kModelVersion);
  put(out, static_cast<std::uint64_t>(tag.size()));
  out.write(tag.data(), static_cast<std::streamsize>(tag.size()));
  for (const auto& r : feature_ranges_) {
    put(out, r.lo);
    put(out, r.hi);
  }
  for (const auto& r : target_ranges_) {
    put(out, r.lo);
    put(out, r.hi);
  }
  put(out, target_mean_.d1);
  put(out, target_mean_.d2);
  forest_.write(out);
}

SystemModel SystemModel::read(std::istream& in) {
  char magic[sizeof(kModelMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kModelMagic, sizeof(magic)) != 0)
    throw std::runtime_error("not a meshrl system model file");
  const auto version = get<std::uint32_t>(in);
  if (version != kModelVersion)
    throw std::runtime_error("unsupported system model version " + std::to_string(version));
  const auto tag_len = get<std::uint64_t>(in);
  if (tag_len > (1u << 20)) throw std::runtime_error("corrupt system model tag");
  std::string tag(tag_len, '\0');
  in.read(tag.data(), static_cast<std::streamsize>(tag_len));
  std::array<Range, kFeatures> fr;
  std::array<Range, kTargets> tr;
  for (auto& r : fr) r = {get<double>(in), get<double>(in)};
  for (auto& r : tr) r = {get<double>(in), get<double>(in)};
  Delays mean{get<double>(in), get<double>(in)};
  SystemModel model(RegressionForest::read(in), fr, tr, mean);
  model.tag = std::move(tag);
  return model;
}

void SystemModel::save(const std::filesystem::path& path) const {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
    write(out);
    if (!out) throw std::runtime_error("failed writing " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

SystemModel SystemModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open system model " + path.string());
  return read(in);
}

}  // namespace meshrl
