#include "meshrl/agent.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "meshrl/rewards.hpp"
#include "meshrl/rng.hpp"

namespace meshrl {

using Eigen::MatrixXd;
using Eigen::RowVectorXd;
using Eigen::VectorXd;

Observation observe(const MeshState& s, const Normalizer& n) {
  return {s.d1 / n.delay_scale, s.d2 / n.delay_scale, s.l1 / n.load_scale, s.l2 / n.load_scale};
}

const char* to_string(HeadLayout layout) {
  return layout == HeadLayout::Flat ? "flat" : "factored";
}

HeadLayout head_layout_from_string(const std::string& name) {
  if (name == "flat") return HeadLayout::Flat;
  if (name == "factored") return HeadLayout::Factored;
  throw std::invalid_argument("unknown head layout '" + name + "'");
}

namespace {

constexpr std::size_t kObsDim = 4;

// Orthogonal initialization scaled by `gain`.
MatrixXd orthogonal(std::size_t rows, std::size_t cols, double gain, std::mt19937_64& rng) {
  const auto big = static_cast<Eigen::Index>(std::max(rows, cols));
  const auto small = static_cast<Eigen::Index>(std::min(rows, cols));
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixXd g(big, small);
  for (Eigen::Index c = 0; c < small; ++c)
    for (Eigen::Index r = 0; r < big; ++r) g(r, c) = normal(rng);
  Eigen::HouseholderQR<MatrixXd> qr(g);
  MatrixXd q = qr.householderQ() * MatrixXd::Identity(big, small);
  const MatrixXd r = qr.matrixQR().topRows(small).triangularView<Eigen::Upper>();
  for (Eigen::Index c = 0; c < small; ++c)
    if (r(c, c) < 0) q.col(c) *= -1.0;
  if (rows < cols) q.transposeInPlace();
  return gain * q;
}

// Softmax of each head segment of a logit column, written into probs.
void head_softmax(const std::vector<std::size_t>& heads, const Eigen::Ref<const VectorXd>& z,
                  Eigen::Ref<VectorXd> probs) {
  Eigen::Index off = 0;
  for (std::size_t h : heads) {
    const auto n = static_cast<Eigen::Index>(h);
    const double m = z.segment(off, n).maxCoeff();
    probs.segment(off, n) = (z.segment(off, n).array() - m).exp();
    probs.segment(off, n) /= probs.segment(off, n).sum();
    off += n;
  }
}

std::size_t argmax_lowest(const Eigen::Ref<const VectorXd>& v) {
  std::size_t best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (v(i) > v(static_cast<Eigen::Index>(best))) best = static_cast<std::size_t>(i);
  return best;
}

}  // namespace

PolicyNet::PolicyNet(int grid_levels, HeadLayout layout, std::size_t hidden, std::uint64_t seed)
    : levels_(grid_levels), layout_(layout), hidden_(hidden) {
  if (grid_levels < 2) throw std::invalid_argument("policy needs a grid with >= 2 levels");
  if (hidden < 1) throw std::invalid_argument("hidden width must be >= 1");
  layout_parameters();

  std::mt19937_64 rng(seed);
  auto init = [&](const Layer& l, double gain) {
    Eigen::Map<MatrixXd>(params_.data() + l.w, static_cast<Eigen::Index>(l.rows),
                         static_cast<Eigen::Index>(l.cols)) = orthogonal(l.rows, l.cols, gain, rng);
    Eigen::Map<VectorXd>(params_.data() + l.b, static_cast<Eigen::Index>(l.rows)).setZero();
  };
  init(pi_[0], std::sqrt(2.0));
  init(pi_[1], std::sqrt(2.0));
  init(pi_[2], 0.01);
  init(vf_[0], std::sqrt(2.0));
  init(vf_[1], std::sqrt(2.0));
  init(vf_[2], 1.0);
}

void PolicyNet::layout_parameters() {
  const auto n = static_cast<std::size_t>(levels_);
  num_actions_ = n * n * n * n;
  heads_ = layout_ == HeadLayout::Flat ? std::vector<std::size_t>{num_actions_}
                                       : std::vector<std::size_t>(4, n);
  num_logits_ = std::accumulate(heads_.begin(), heads_.end(), std::size_t{0});

  std::size_t off = 0;
  auto place = [&off](std::size_t rows, std::size_t cols) {
    Layer l{off, off + rows * cols, rows, cols};
    off += rows * cols + rows;
    return l;
  };
  pi_ = {place(hidden_, kObsDim), place(hidden_, hidden_), place(num_logits_, hidden_)};
  vf_ = {place(hidden_, kObsDim), place(hidden_, hidden_), place(1, hidden_)};
  params_ = VectorXd::Zero(static_cast<Eigen::Index>(off));
}

Eigen::Map<const MatrixXd> PolicyNet::weight(const Layer& l) const {
  return {params_.data() + l.w, static_cast<Eigen::Index>(l.rows),
          static_cast<Eigen::Index>(l.cols)};
}

Eigen::Map<const VectorXd> PolicyNet::bias(const Layer& l) const {
  return {params_.data() + l.b, static_cast<Eigen::Index>(l.rows)};
}

void PolicyNet::forward(const MatrixXd& x, Cache& c) const {
  c.x = x;
  c.h1 = ((weight(pi_[0]) * x).colwise() + bias(pi_[0])).array().tanh();
  c.h2 = ((weight(pi_[1]) * c.h1).colwise() + bias(pi_[1])).array().tanh();
  c.logits = (weight(pi_[2]) * c.h2).colwise() + bias(pi_[2]);
  c.g1 = ((weight(vf_[0]) * x).colwise() + bias(vf_[0])).array().tanh();
  c.g2 = ((weight(vf_[1]) * c.g1).colwise() + bias(vf_[1])).array().tanh();
  c.values = ((weight(vf_[2]) * c.g2).colwise() + bias(vf_[2])).row(0);
}

void PolicyNet::backward(const Cache& c, const MatrixXd& d_logits, const RowVectorXd& d_values,
                         VectorXd& grad) const {
  if (grad.size() != params_.size()) grad = VectorXd::Zero(params_.size());
  auto gw = [&grad](const Layer& l) {
    return Eigen::Map<MatrixXd>(grad.data() + l.w, static_cast<Eigen::Index>(l.rows),
                                static_cast<Eigen::Index>(l.cols));
  };
  auto gb = [&grad](const Layer& l) {
    return Eigen::Map<VectorXd>(grad.data() + l.b, static_cast<Eigen::Index>(l.rows));
  };

  auto trunk = [&](const std::array<Layer, 3>& net, const MatrixXd& a1, const MatrixXd& a2,
                   const MatrixXd& d_out) {
    gw(net[2]).noalias() += d_out * a2.transpose();
    gb(net[2]) += d_out.rowwise().sum();
    MatrixXd d2 = (weight(net[2]).transpose() * d_out).array() * (1.0 - a2.array().square());
    gw(net[1]).noalias() += d2 * a1.transpose();
    gb(net[1]) += d2.rowwise().sum();
    MatrixXd d1 = (weight(net[1]).transpose() * d2).array() * (1.0 - a1.array().square());
    gw(net[0]).noalias() += d1 * c.x.transpose();
    gb(net[0]) += d1.rowwise().sum();
  };
  trunk(pi_, c.h1, c.h2, d_logits);
  trunk(vf_, c.g1, c.g2, MatrixXd(d_values));
}

VectorXd PolicyNet::logits(const Observation& obs) const {
  const Eigen::Map<const VectorXd> x(obs.data(), kObsDim);
  const VectorXd h1 = ((weight(pi_[0]) * x) + bias(pi_[0])).array().tanh();
  const VectorXd h2 = ((weight(pi_[1]) * h1) + bias(pi_[1])).array().tanh();
  return weight(pi_[2]) * h2 + bias(pi_[2]);
}

double PolicyNet::value(const Observation& obs) const {
  const Eigen::Map<const VectorXd> x(obs.data(), kObsDim);
  const VectorXd g1 = ((weight(vf_[0]) * x) + bias(vf_[0])).array().tanh();
  const VectorXd g2 = ((weight(vf_[1]) * g1) + bias(vf_[1])).array().tanh();
  return (weight(vf_[2]) * g2 + bias(vf_[2]))(0);
}

std::vector<std::size_t> PolicyNet::head_choices(ActionIndex action) const {
  if (action >= num_actions_) throw std::out_of_range("action index out of range");
  if (layout_ == HeadLayout::Flat) return {action};
  std::vector<std::size_t> k(4);
  const auto n = static_cast<std::size_t>(levels_);
  for (int d = 3; d >= 0; --d) {
    k[static_cast<std::size_t>(d)] = action % n;
    action /= n;
  }
  return k;
}

std::vector<double> PolicyNet::action_probabilities(const Observation& obs) const {
  const VectorXd z = logits(obs);
  VectorXd p(z.size());
  head_softmax(heads_, z, p);
  if (layout_ == HeadLayout::Flat) return {p.data(), p.data() + p.size()};
  std::vector<double> out(num_actions_);
  const auto n = static_cast<Eigen::Index>(levels_);
  for (ActionIndex a = 0; a < num_actions_; ++a) {
    const auto k = head_choices(a);
    double prob = 1.0;
    for (std::size_t h = 0; h < 4; ++h) prob *= p(static_cast<Eigen::Index>(h) * n +
                                                 static_cast<Eigen::Index>(k[h]));
    out[a] = prob;
  }
  return out;
}

double PolicyNet::log_prob(const Observation& obs, ActionIndex action) const {
  const VectorXd z = logits(obs);
  VectorXd p(z.size());
  head_softmax(heads_, z, p);
  const auto k = head_choices(action);
  double lp = 0.0;
  Eigen::Index off = 0;
  for (std::size_t h = 0; h < heads_.size(); ++h) {
    lp += std::log(p(off + static_cast<Eigen::Index>(k[h])));
    off += static_cast<Eigen::Index>(heads_[h]);
  }
  return lp;
}

ActionIndex PolicyNet::greedy(const Observation& obs) const {
  const VectorXd z = logits(obs);
  ActionIndex a = 0;
  Eigen::Index off = 0;
  for (std::size_t h : heads_) {
    const auto n = static_cast<Eigen::Index>(h);
    a = a * h + argmax_lowest(z.segment(off, n));
    off += n;
  }
  return a;
}

ActionIndex PolicyNet::sample(const Observation& obs, std::mt19937_64& rng) const {
  const VectorXd z = logits(obs);
  VectorXd p(z.size());
  head_softmax(heads_, z, p);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ActionIndex a = 0;
  Eigen::Index off = 0;
  for (std::size_t h : heads_) {
    const double u = unit(rng);
    double acc = 0.0;
    std::size_t pick = h - 1;
    for (std::size_t i = 0; i < h; ++i) {
      acc += p(off + static_cast<Eigen::Index>(i));
      if (u < acc) {
        pick = i;
        break;
      }
    }
    a = a * h + pick;
    off += static_cast<Eigen::Index>(h);
  }
  return a;
}

ActionIndex act(const PolicyNet& policy, const Observation& obs, ActMode mode,
                std::mt19937_64& rng) {
  return mode == ActMode::Greedy ? policy.greedy(obs) : policy.sample(obs, rng);
}

namespace {
constexpr const char* kPolicyFormat = "meshrl.policy/1";
}

std::string PolicyNet::serialize() const {
  nlohmann::json j;
  j["format"] = kPolicyFormat;
  j["grid_levels"] = levels_;
  j["head"] = to_string(layout_);
  j["hidden"] = hidden_;
  j["reward_scale"] = reward_scale;
  j["normalizer"] = {{"load_scale", normalizer.load_scale},
                     {"delay_scale", normalizer.delay_scale}};
  if (!tag.empty()) j["tag"] = tag;
  if (!config_json.empty()) j["config"] = nlohmann::json::parse(config_json);
  j["parameters"] = std::vector<double>(params_.data(), params_.data() + params_.size());
  return j.dump();
}

PolicyNet PolicyNet::deserialize(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  if (j.value("format", "") != kPolicyFormat)
    throw std::runtime_error("unsupported policy checkpoint format");
  PolicyNet net;
  net.levels_ = j.at("grid_levels").get<int>();
  net.layout_ = head_layout_from_string(j.at("head").get<std::string>());
  net.hidden_ = j.at("hidden").get<std::size_t>();
  if (net.levels_ < 2 || net.hidden_ < 1) throw std::runtime_error("corrupt policy checkpoint");
  net.layout_parameters();
  const auto p = j.at("parameters").get<std::vector<double>>();
  if (p.size() != static_cast<std::size_t>(net.params_.size()))
    throw std::runtime_error("policy checkpoint parameter count mismatch");
  net.params_ = Eigen::Map<const VectorXd>(p.data(), static_cast<Eigen::Index>(p.size()));
  net.reward_scale = j.at("reward_scale").get<double>();
  net.normalizer.load_scale = j.at("normalizer").at("load_scale").get<double>();
  net.normalizer.delay_scale = j.at("normalizer").at("delay_scale").get<double>();
  net.tag = j.value("tag", "");
  if (j.contains("config")) net.config_json = j.at("config").dump();
  return net;
}

void PolicyNet::save(const std::filesystem::path& path) const {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
    out << serialize() << '\n';
    if (!out) throw std::runtime_error("failed writing " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

PolicyNet PolicyNet::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open policy checkpoint " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return deserialize(ss.str());
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in [0,1)");
  if (!(gae_lambda >= 0.0 && gae_lambda <= 1.0))
    throw std::invalid_argument("gae_lambda must lie in [0,1]");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (rollout_length < batch_size)
    throw std::invalid_argument("rollout_length must be >= batch_size");
  if (!(clip_ratio > 0.0)) throw std::invalid_argument("clip_ratio must be > 0");
  if (epochs_per_update < 1) throw std::invalid_argument("epochs_per_update must be >= 1");
  if (total_steps < 1) throw std::invalid_argument("total_steps must be >= 1");
  if (!(entropy_coeff >= 0.0) || !(value_coeff >= 0.0))
    throw std::invalid_argument("loss coefficients must be >= 0");
  if (!(normalizer.load_scale > 0.0) || !(normalizer.delay_scale > 0.0))
    throw std::invalid_argument("normalizer scales must be > 0");
}

std::vector<double> compute_advantages(std::span<const double> rewards,
                                       std::span<const double> values, double last_value,
                                       double gamma, double lambda) {
  if (rewards.size() != values.size())
    throw std::invalid_argument("rewards/values length mismatch");
  std::vector<double> adv(rewards.size());
  double running = 0.0;
  for (std::size_t i = rewards.size(); i-- > 0;) {
    const double next_value = i + 1 < values.size() ? values[i + 1] : last_value;
    const double delta = rewards[i] + gamma * next_value - values[i];
    running = delta + gamma * lambda * running;
    adv[i] = running;
  }
  return adv;
}

double clipped_objective(double ratio, double advantage, double clip_ratio) {
  const double clipped = std::clamp(ratio, 1.0 - clip_ratio, 1.0 + clip_ratio);
  return std::min(ratio * advantage, clipped * advantage);
}

namespace {

using OptimumFunction = std::function<double(LoadPair)>;

class Adam {
 public:
  Adam(Eigen::Index n, double lr, double eps)
      : m_(VectorXd::Zero(n)), v_(VectorXd::Zero(n)), lr_(lr), eps_(eps) {}

  void step(VectorXd& params, const VectorXd& grad) {
    ++t_;
    m_ = kBeta1 * m_ + (1.0 - kBeta1) * grad;
    v_ = kBeta2 * v_ + (1.0 - kBeta2) * grad.cwiseAbs2();
    const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
    params.array() -= lr_ * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps_);
  }

 private:
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  VectorXd m_, v_;
  double lr_, eps_;
  long t_ = 0;
};

struct Rollout {
  std::vector<Observation> obs;
  std::vector<ActionIndex> actions;
  std::vector<double> log_probs;
  std::vector<double> values;
  std::vector<double> rewards;  // raw
  std::vector<double> nr;

  void clear() {
    obs.clear();
    actions.clear();
    log_probs.clear();
    values.clear();
    rewards.clear();
    nr.clear();
  }
  std::size_t size() const { return obs.size(); }
};

struct LossStats {
  double policy = 0.0, value = 0.0, entropy = 0.0;
};

class PpoTrainer {
 public:
  PpoTrainer(PolicyNet& net, const TrainConfig& cfg)
      : net_(net), cfg_(cfg), adam_(net.parameters().size(), cfg.learning_rate, cfg.adam_epsilon) {}

  void update(const Rollout& ro, double last_value, std::mt19937_64& rng, std::size_t update_id) {
    const std::size_t n = ro.size();
    std::vector<double> scaled(n);
    for (std::size_t i = 0; i < n; ++i) scaled[i] = ro.rewards[i] / net_.reward_scale;
    std::vector<double> adv =
        compute_advantages(scaled, ro.values, last_value, cfg_.gamma, cfg_.gae_lambda);
    std::vector<double> returns(n);
    for (std::size_t i = 0; i < n; ++i) returns[i] = adv[i] + ro.values[i];
    if (cfg_.normalize_advantage && n > 1) {
      const double mean = std::accumulate(adv.begin(), adv.end(), 0.0) / static_cast<double>(n);
      double var = 0.0;
      for (double a : adv) var += (a - mean) * (a - mean);
      const double sd = std::sqrt(var / static_cast<double>(n));
      for (double& a : adv) a = (a - mean) / (sd + 1e-8);
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t epoch = 0; epoch < cfg_.epochs_per_update; ++epoch) {
      std::shuffle(order.begin(), order.end(), rng);
      for (std::size_t start = 0; start < n; start += cfg_.batch_size) {
        const std::size_t stop = std::min(n, start + cfg_.batch_size);
        const std::span<const std::size_t> batch(order.data() + start, stop - start);
        const LossStats loss = minibatch(ro, batch, adv, returns);
        if (!std::isfinite(loss.policy) || !std::isfinite(loss.value) ||
            !std::isfinite(loss.entropy) || !net_.parameters().allFinite()) {
          std::ostringstream dump;
          dump << "non-finite PPO loss at update " << update_id << " epoch " << epoch
               << " minibatch " << start / cfg_.batch_size << ": policy_loss=" << loss.policy
               << " value_loss=" << loss.value << " entropy=" << loss.entropy
               << " |params|=" << net_.parameters().norm()
               << " params_finite=" << net_.parameters().allFinite()
               << " reward_scale=" << net_.reward_scale << " rollout_mean_reward="
               << std::accumulate(ro.rewards.begin(), ro.rewards.end(), 0.0) /
                      static_cast<double>(n);
          throw TrainingError(dump.str());
        }
      }
    }
  }

 private:
  LossStats minibatch(const Rollout& ro, std::span<const std::size_t> batch,
                      const std::vector<double>& adv, const std::vector<double>& returns) {
    const auto b = static_cast<Eigen::Index>(batch.size());
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    MatrixXd x(kObsDim, b);
    for (Eigen::Index s = 0; s < b; ++s)
      for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(kObsDim); ++k)
        x(k, s) = ro.obs[batch[static_cast<std::size_t>(s)]][static_cast<std::size_t>(k)];
    net_.forward(x, cache_);

    const auto& heads = net_.head_sizes();
    MatrixXd d_logits(cache_.logits.rows(), b);
    RowVectorXd d_values(b);
    VectorXd p(cache_.logits.rows());
    LossStats loss;
    for (Eigen::Index s = 0; s < b; ++s) {
      const std::size_t i = batch[static_cast<std::size_t>(s)];
      head_softmax(heads, cache_.logits.col(s), p);
      const auto choice = net_.head_choices(ro.actions[i]);

      double logp = 0.0;
      Eigen::Index off = 0;
      for (std::size_t h = 0; h < heads.size(); ++h) {
        logp += std::log(p(off + static_cast<Eigen::Index>(choice[h])));
        off += static_cast<Eigen::Index>(heads[h]);
      }
      const double ratio = std::exp(logp - ro.log_probs[i]);
      const double a = adv[i];
      const double unclipped = ratio * a;
      const double clipped =
          std::clamp(ratio, 1.0 - cfg_.clip_ratio, 1.0 + cfg_.clip_ratio) * a;
      loss.policy -= std::min(unclipped, clipped) * inv_b;
      // d(-min)/dlogp is -ratio*A when the unclipped branch is active, else 0.
      const double g_logp = unclipped <= clipped ? -a * ratio * inv_b : 0.0;

      off = 0;
      for (std::size_t h = 0; h < heads.size(); ++h) {
        const auto n = static_cast<Eigen::Index>(heads[h]);
        auto ph = p.segment(off, n);
        const VectorXd logph = ph.array().max(1e-300).log();
        const double entropy = -(ph.array() * logph.array()).sum();
        loss.entropy += entropy * inv_b;
        auto dz = d_logits.col(s).segment(off, n);
        // policy term: g_logp * (onehot - p); entropy term: c * p (log p + H) / B
        dz = -g_logp * ph;
        dz(static_cast<Eigen::Index>(choice[h])) += g_logp;
        dz.array() += cfg_.entropy_coeff * inv_b * ph.array() * (logph.array() + entropy);
        off += n;
      }

      const double verr = cache_.values(s) - returns[i];
      loss.value += verr * verr * inv_b;
      d_values(s) = 2.0 * cfg_.value_coeff * verr * inv_b;
    }

    grad_.setZero(net_.parameters().size());
    net_.backward(cache_, d_logits, d_values, grad_);
    const double norm = grad_.norm();
    if (cfg_.max_grad_norm > 0.0 && norm > cfg_.max_grad_norm) grad_ *= cfg_.max_grad_norm / norm;
    adam_.step(net_.parameters(), grad_);
    return loss;
  }

  PolicyNet& net_;
  const TrainConfig& cfg_;
  Adam adam_;
  PolicyNet::Cache cache_;
  VectorXd grad_;
};

TrainResult train_impl(Simulator& sim, const RewardFunction& reward_fn,
                       const OptimumFunction& optimum, double reward_scale,
                       const LoadPattern& pattern, const TrainConfig& cfg) {
  cfg.validate();
  pattern.validate();
  if (!(reward_scale > 0.0)) throw std::invalid_argument("reward scale must be > 0");
  const ActionGrid& grid = sim.grid();

  TrainResult result;
  PolicyNet& net = result.policy;
  net = PolicyNet(grid.levels(), cfg.head, cfg.hidden, derive_seed(cfg.seed, "policy-init"));
  net.reward_scale = reward_scale;
  net.normalizer = cfg.normalizer;

  std::mt19937_64 act_rng(derive_seed(cfg.seed, "policy-sample"));
  std::mt19937_64 batch_rng(derive_seed(cfg.seed, "minibatch"));
  PpoTrainer trainer(net, cfg);
  Rollout ro;
  MeshState state;
  std::size_t update_id = 0;

  for (std::size_t t = 0; t < cfg.total_steps; ++t) {
    const LoadPair loads = offered_loads(pattern, t);
    state.l1 = loads.l1;
    state.l2 = loads.l2;
    const Observation obs = observe(state, net.normalizer);
    const ActionIndex a = net.sample(obs, act_rng);
    const Delays d = sim.step(loads, a);
    const double r = reward_fn(loads, grid[a], d);

    ro.obs.push_back(obs);
    ro.actions.push_back(a);
    ro.log_probs.push_back(net.log_prob(obs, a));
    ro.values.push_back(net.value(obs));
    ro.rewards.push_back(r);
    if (optimum) {
      const double best = optimum(loads);
      ro.nr.push_back(best > 0.0 ? r / best : 1.0);
    }
    state.d1 = d.d1;
    state.d2 = d.d2;

    const bool last = t + 1 == cfg.total_steps;
    if (ro.size() == cfg.rollout_length || last) {
      CurvePoint point;
      point.step = t + 1;
      point.mean_reward = std::accumulate(ro.rewards.begin(), ro.rewards.end(), 0.0) /
                          static_cast<double>(ro.size());
      point.anr = optimum ? std::accumulate(ro.nr.begin(), ro.nr.end(), 0.0) /
                                static_cast<double>(ro.nr.size())
                          : std::numeric_limits<double>::quiet_NaN();
      result.curve.push_back(point);

      MeshState next = state;
      const LoadPair next_loads = offered_loads(pattern, t + 1);
      next.l1 = next_loads.l1;
      next.l2 = next_loads.l2;
      trainer.update(ro, net.value(observe(next, net.normalizer)), batch_rng, update_id++);
      ro.clear();
    }
  }
  return result;
}

}  // namespace

TrainResult train(Simulator& simulator, const ManagementObjective& objective,
                  const LoadPattern& load_pattern, const TrainConfig& config) {
  objective.validate();
  RewardFunction reward_fn = [&objective](LoadPair l, const Action& a, Delays d) {
    return reward(objective, l, a, d);
  };
  OptimumFunction optimum = [&](LoadPair l) {
    return simulator.optimal(objective, l).best_reward;
  };
  return train_impl(simulator, reward_fn, optimum,
                    reward_upper_bound(objective, load_pattern.max_load()), load_pattern, config);
}

TrainResult train_with_reward(Simulator& simulator, const RewardFunction& reward_fn,
                              double reward_scale, const LoadPattern& load_pattern,
                              const TrainConfig& config) {
  return train_impl(simulator, reward_fn, {}, reward_scale, load_pattern, config);
}

}  // namespace meshrl
