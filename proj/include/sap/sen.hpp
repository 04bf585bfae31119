#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sap/strategy.hpp"

namespace sap {

// Three affine layers with rectifier activations and a logistic output:
// (2d -> h1) -> relu -> (h1 -> h2) -> relu -> (h2 -> 1) -> sigmoid.
// Predicts the probability that strategy `a` beats strategy `b`.
struct SENParams {
  int in_dim = 2 * static_cast<int>(k_strategy_dim);
  int h1 = 64;
  int h2 = 64;
  std::vector<double> w1, b1;  // h1 x in_dim, row-major
  std::vector<double> w2, b2;  // h2 x h1
  std::vector<double> w3, b3;  // 1 x h2

  bool shapes_ok() const {
    return static_cast<int>(w1.size()) == h1 * in_dim && static_cast<int>(b1.size()) == h1 &&
           static_cast<int>(w2.size()) == h2 * h1 && static_cast<int>(b2.size()) == h2 &&
           static_cast<int>(w3.size()) == h2 && static_cast<int>(b3.size()) == 1;
  }

  static SENParams zeros(int in_dim, int h1, int h2) {
    SENParams p;
    p.in_dim = in_dim;
    p.h1 = h1;
    p.h2 = h2;
    p.w1.assign(static_cast<std::size_t>(h1 * in_dim), 0.0);
    p.b1.assign(static_cast<std::size_t>(h1), 0.0);
    p.w2.assign(static_cast<std::size_t>(h2 * h1), 0.0);
    p.b2.assign(static_cast<std::size_t>(h2), 0.0);
    p.w3.assign(static_cast<std::size_t>(h2), 0.0);
    p.b3.assign(1, 0.0);
    return p;
  }

  // seeded uniform init scaled by fan-in
  static SENParams init(int in_dim, int h1, int h2, std::uint64_t seed) {
    SENParams p = zeros(in_dim, h1, h2);
    Rng rng(seed);
    auto fill = [&rng](std::vector<double>& v, int fan_in) {
      double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
      for (double& x : v) x = rng.uniform(-bound, bound);
    };
    fill(p.w1, in_dim);
    fill(p.b1, in_dim);
    fill(p.w2, h1);
    fill(p.b2, h1);
    fill(p.w3, h2);
    fill(p.b3, h2);
    return p;
  }
};

namespace detail {

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

struct ForwardTrace {
  std::vector<double> x, a1, a2;  // post-activation values
  double p = 0.5;
};

inline ForwardTrace forward_trace(const SENParams& p, std::span<const double> x) {
  if (static_cast<int>(x.size()) != p.in_dim || !p.shapes_ok())
    throw std::invalid_argument("sen forward: shape mismatch");
  ForwardTrace t;
  t.x.assign(x.begin(), x.end());
  t.a1.resize(static_cast<std::size_t>(p.h1));
  t.a2.resize(static_cast<std::size_t>(p.h2));
  for (int i = 0; i < p.h1; ++i) {
    double z = p.b1[static_cast<std::size_t>(i)];
    const double* row = &p.w1[static_cast<std::size_t>(i * p.in_dim)];
    for (int j = 0; j < p.in_dim; ++j) z += row[j] * t.x[static_cast<std::size_t>(j)];
    t.a1[static_cast<std::size_t>(i)] = z > 0.0 ? z : 0.0;
  }
  for (int i = 0; i < p.h2; ++i) {
    double z = p.b2[static_cast<std::size_t>(i)];
    const double* row = &p.w2[static_cast<std::size_t>(i * p.h1)];
    for (int j = 0; j < p.h1; ++j) z += row[j] * t.a1[static_cast<std::size_t>(j)];
    t.a2[static_cast<std::size_t>(i)] = z > 0.0 ? z : 0.0;
  }
  double z3 = p.b3[0];
  for (int j = 0; j < p.h2; ++j) z3 += p.w3[static_cast<std::size_t>(j)] * t.a2[static_cast<std::size_t>(j)];
  t.p = sigmoid(z3);
  return t;
}

}  // namespace detail

inline std::vector<double> concat(const StrategyVector& a, const StrategyVector& b) {
  std::vector<double> x;
  x.reserve(2 * k_strategy_dim);
  x.insert(x.end(), a.begin(), a.end());
  x.insert(x.end(), b.begin(), b.end());
  return x;
}

inline double forward(const SENParams& p, std::span<const double> x) {
  return detail::forward_trace(p, x).p;
}

inline double forward(const SENParams& p, const StrategyVector& a, const StrategyVector& b) {
  return forward(p, concat(a, b));
}

inline constexpr double k_bce_eps = 1e-7;

// -(t log p + (1-t) log(1-p)); soft targets allowed, pred clamped away from 0/1
inline double bce_loss(double pred, double target) {
  double p = pred < k_bce_eps ? k_bce_eps : (pred > 1.0 - k_bce_eps ? 1.0 - k_bce_eps : pred);
  return -(target * std::log(p) + (1.0 - target) * std::log(1.0 - p));
}

struct ResultRecord {
  StrategyVector a{};
  StrategyVector b{};
  double r = 0.5;
  int i = -1;  // library indexes when known
  int j = -1;
  std::string split;  // "", "train" or "test"
};

struct ResultDataset {
  std::vector<ResultRecord> records;

  std::vector<const ResultRecord*> tagged(const std::string& tag) const {
    std::vector<const ResultRecord*> out;
    for (const auto& r : records)
      if (r.split == tag) out.push_back(&r);
    return out;
  }
};

// seeded 80/20-style tagging, in place
inline void assign_splits(ResultDataset& data, double test_fraction, std::uint64_t seed) {
  std::vector<std::size_t> order(data.records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);
  std::size_t n_test = static_cast<std::size_t>(test_fraction * static_cast<double>(order.size()));
  for (std::size_t k = 0; k < order.size(); ++k)
    data.records[order[k]].split = k < n_test ? "test" : "train";
}

struct SENGradients {
  std::vector<double> w1, b1, w2, b2, w3, b3;

  static SENGradients zeros(const SENParams& p) {
    SENGradients g;
    g.w1.assign(p.w1.size(), 0.0);
    g.b1.assign(p.b1.size(), 0.0);
    g.w2.assign(p.w2.size(), 0.0);
    g.b2.assign(p.b2.size(), 0.0);
    g.w3.assign(p.w3.size(), 0.0);
    g.b3.assign(p.b3.size(), 0.0);
    return g;
  }
};

// Exact gradient of the mean batch BCE loss by backpropagation.
inline SENGradients gradient(const SENParams& p, const std::vector<const ResultRecord*>& batch) {
  if (batch.empty()) throw std::invalid_argument("gradient: empty batch");
  SENGradients g = SENGradients::zeros(p);
  double inv_n = 1.0 / static_cast<double>(batch.size());

  std::vector<double> d2(static_cast<std::size_t>(p.h2));
  std::vector<double> d1(static_cast<std::size_t>(p.h1));

  for (const ResultRecord* rec : batch) {
    detail::ForwardTrace t = detail::forward_trace(p, concat(rec->a, rec->b));
    double dz3 = (t.p - rec->r) * inv_n;  // sigmoid + BCE

    g.b3[0] += dz3;
    for (int j = 0; j < p.h2; ++j) {
      g.w3[static_cast<std::size_t>(j)] += dz3 * t.a2[static_cast<std::size_t>(j)];
      d2[static_cast<std::size_t>(j)] =
          t.a2[static_cast<std::size_t>(j)] > 0.0 ? dz3 * p.w3[static_cast<std::size_t>(j)] : 0.0;
    }
    for (int i = 0; i < p.h2; ++i) {
      double di = d2[static_cast<std::size_t>(i)];
      if (di == 0.0) continue;
      g.b2[static_cast<std::size_t>(i)] += di;
      double* grow = &g.w2[static_cast<std::size_t>(i * p.h1)];
      for (int j = 0; j < p.h1; ++j) grow[j] += di * t.a1[static_cast<std::size_t>(j)];
    }
    for (int j = 0; j < p.h1; ++j) {
      double acc = 0.0;
      for (int i = 0; i < p.h2; ++i)
        acc += d2[static_cast<std::size_t>(i)] * p.w2[static_cast<std::size_t>(i * p.h1 + j)];
      d1[static_cast<std::size_t>(j)] = t.a1[static_cast<std::size_t>(j)] > 0.0 ? acc : 0.0;
    }
    for (int i = 0; i < p.h1; ++i) {
      double di = d1[static_cast<std::size_t>(i)];
      if (di == 0.0) continue;
      g.b1[static_cast<std::size_t>(i)] += di;
      double* grow = &g.w1[static_cast<std::size_t>(i * p.in_dim)];
      for (int j = 0; j < p.in_dim; ++j) grow[j] += di * t.x[static_cast<std::size_t>(j)];
    }
  }
  return g;
}

inline double mean_loss(const SENParams& p, const std::vector<const ResultRecord*>& recs) {
  if (recs.empty()) return 0.0;
  double total = 0.0;
  for (const ResultRecord* r : recs) total += bce_loss(forward(p, r->a, r->b), r->r);
  return total / static_cast<double>(recs.size());
}

struct TrainConfig {
  int hidden1 = 64;
  int hidden2 = 64;
  double lr = 0.005;
  double momentum = 0.9;
  double weight_decay = 5e-4;  // L2 on weights, not biases
  double ema_decay = 0.0;      // >0: maintain and return averaged weights
  int batch_size = 8;
  int max_epochs = 3000;
  int patience = 300;
  double val_fraction = 0.2;
  std::uint64_t seed = 0;
};

struct TrainLogRow {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
};

// Seed-deterministic mini-batch gradient descent with momentum and
// best-validation early stopping. Records tagged "test" are never touched;
// a validation slice is carved out of the training records by the seed.
inline SENParams train(const ResultDataset& data, const TrainConfig& cfg,
                       std::vector<TrainLogRow>* log = nullptr) {
  std::vector<const ResultRecord*> pool;
  for (const auto& r : data.records)
    if (r.split != "test") pool.push_back(&r);
  if (pool.empty()) throw std::invalid_argument("train: no training records");

  Rng rng(cfg.seed);
  std::vector<const ResultRecord*> shuffled = pool;
  rng.shuffle(shuffled);
  std::size_t n_val = static_cast<std::size_t>(cfg.val_fraction * static_cast<double>(shuffled.size()));
  std::vector<const ResultRecord*> val(shuffled.begin(),
                                       shuffled.begin() + static_cast<std::ptrdiff_t>(n_val));
  std::vector<const ResultRecord*> tr(shuffled.begin() + static_cast<std::ptrdiff_t>(n_val),
                                      shuffled.end());
  if (tr.empty()) {
    tr = shuffled;
    val.clear();
  }

  SENParams p = SENParams::init(2 * static_cast<int>(k_strategy_dim), cfg.hidden1, cfg.hidden2,
                                rng.next_u64());
  SENParams ema = p;
  bool use_ema = cfg.ema_decay > 0.0;
  SENGradients vel = SENGradients::zeros(p);
  SENParams best = p;
  double best_val = std::numeric_limits<double>::infinity();
  int stale = 0;

  auto apply = [&](std::vector<double>& w, std::vector<double>& v, const std::vector<double>& g,
                   std::vector<double>& e, bool decay) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      v[i] = cfg.momentum * v[i] + g[i] + (decay ? cfg.weight_decay * w[i] : 0.0);
      w[i] -= cfg.lr * v[i];
      if (use_ema) e[i] = cfg.ema_decay * e[i] + (1.0 - cfg.ema_decay) * w[i];
    }
  };

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    rng.shuffle(tr);
    for (std::size_t at = 0; at < tr.size(); at += static_cast<std::size_t>(cfg.batch_size)) {
      std::size_t end = std::min(tr.size(), at + static_cast<std::size_t>(cfg.batch_size));
      std::vector<const ResultRecord*> batch(tr.begin() + static_cast<std::ptrdiff_t>(at),
                                             tr.begin() + static_cast<std::ptrdiff_t>(end));
      SENGradients g = gradient(p, batch);
      apply(p.w1, vel.w1, g.w1, ema.w1, true);
      apply(p.b1, vel.b1, g.b1, ema.b1, false);
      apply(p.w2, vel.w2, g.w2, ema.w2, true);
      apply(p.b2, vel.b2, g.b2, ema.b2, false);
      apply(p.w3, vel.w3, g.w3, ema.w3, true);
      apply(p.b3, vel.b3, g.b3, ema.b3, false);
    }

    const SENParams& candidate = use_ema ? ema : p;
    double vloss = mean_loss(candidate, val.empty() ? tr : val);
    if (log != nullptr) log->push_back({epoch, mean_loss(candidate, tr), vloss});
    if (vloss < best_val - 1e-9) {
      best_val = vloss;
      best = candidate;
      stale = 0;
    } else if (++stale > cfg.patience) {
      break;
    }
  }
  return best;
}

struct EvalMetrics {
  int tp = 0, fp = 0, fn = 0, tn = 0;
  double accuracy = 0.0;
  double fp_rate = 0.0;  // fp / (fp + tn)

  int total() const { return tp + fp + fn + tn; }
};

// Targets binarized at r > 0.5 (1 = win, 0 = non-win), predictions at
// `threshold`.
inline EvalMetrics evaluate(const SENParams& p, const std::vector<const ResultRecord*>& test,
                            double threshold = 0.5) {
  if (test.empty()) throw std::invalid_argument("evaluate: empty test set");
  EvalMetrics m;
  for (const ResultRecord* r : test) {
    bool truth = r->r > 0.5;
    bool pred = forward(p, r->a, r->b) > threshold;
    if (truth && pred) m.tp++;
    else if (!truth && pred) m.fp++;
    else if (truth && !pred) m.fn++;
    else m.tn++;
  }
  m.accuracy = static_cast<double>(m.tp + m.tn) / static_cast<double>(m.total());
  m.fp_rate = (m.fp + m.tn) > 0 ? static_cast<double>(m.fp) / static_cast<double>(m.fp + m.tn) : 0.0;
  return m;
}

struct BestResponse {
  Strategy strategy;
  double win_probability = 0.0;
};

// Exhaustive scan of the full strategy space; ties keep the first maximizer
// in enumeration order.
inline BestResponse best_response(const SENParams& p, const Strategy& opponent) {
  StrategyVector opp = encode(opponent);
  BestResponse best{enumerate_space().front(), -1.0};
  for (const Strategy& cand : enumerate_space()) {
    double prob = forward(p, encode(cand), opp);
    if (prob > best.win_probability) {
      best.strategy = cand;
      best.win_probability = prob;
    }
  }
  return best;
}

}  // namespace sap
