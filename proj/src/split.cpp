#include "rofigs/split.hpp"

#include <algorithm>
#include <cmath>

#include "rofigs/error.hpp"
#include "rofigs/rng.hpp"

namespace rofigs {

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

constexpr double kInitScale = 0.5;
constexpr double kEmptySideMass = 1e-12;

}  // namespace

bool ObliqueSplit::routes_left(const Matrix& X, std::size_t row) const {
  double proj = 0.0;
  for (std::size_t j = 0; j < features.size(); ++j)
    proj += weights[j] * X(row, features[j]);
  return proj <= threshold;
}

std::size_t ObliqueSplit::nonzero_count() const {
  std::size_t c = 0;
  for (double w : weights)
    if (w != 0.0) ++c;
  return c;
}

std::vector<std::size_t> ObliqueSplit::nonzero_features() const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < weights.size(); ++j)
    if (weights[j] != 0.0) out.push_back(features[j]);
  return out;
}

double half_norm(std::span<const double> w) {
  double s = 0.0;
  for (double wi : w) s += std::sqrt(std::abs(wi));
  return s * s;
}

double node_sse(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double sse = 0.0;
  for (double v : values) sse += (v - mean) * (v - mean);
  return sse;
}

ObjectiveEval smoothed_objective(std::span<const double> w, double b,
                                 const Matrix& X_sub,
                                 std::span<const double> residuals,
                                 const SplitSearchConfig& cfg) {
  const std::size_t n = X_sub.rows();
  const std::size_t k = X_sub.cols();
  const double alpha = cfg.sigmoid_steepness;
  const double c = cfg.impurity_weight;

  std::vector<double> s(n);
  double mass_r = 0.0, mass_l = 0.0;
  double num_r = 0.0, num_l = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double z = b;
    for (std::size_t j = 0; j < k; ++j) z += w[j] * X_sub(i, j);
    s[i] = sigmoid(alpha * z);
    mass_r += s[i];
    mass_l += 1.0 - s[i];
    num_r += s[i] * residuals[i];
    num_l += (1.0 - s[i]) * residuals[i];
  }
  const bool has_r = mass_r > kEmptySideMass;
  const bool has_l = mass_l > kEmptySideMass;
  const double mu_r = has_r ? num_r / mass_r : 0.0;
  const double mu_l = has_l ? num_l / mass_l : 0.0;

  ObjectiveEval out;
  out.grad_w.assign(k, 0.0);
  double g = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dev_r = residuals[i] - mu_r;
    double dev_l = residuals[i] - mu_l;
    double dg_ds = 0.0;
    if (has_r) {
      g += s[i] * dev_r * dev_r;
      dg_ds += dev_r * dev_r;
    }
    if (has_l) {
      g += (1.0 - s[i]) * dev_l * dev_l;
      dg_ds -= dev_l * dev_l;
    }
    double chain = c * dg_ds * alpha * s[i] * (1.0 - s[i]);
    for (std::size_t j = 0; j < k; ++j) out.grad_w[j] += chain * X_sub(i, j);
    out.grad_b += chain;
  }

  double sq_sum = 0.0;
  for (std::size_t j = 0; j < k; ++j)
    sq_sum += std::sqrt(std::abs(w[j]) + cfg.sqrt_smoothing);
  for (std::size_t j = 0; j < k; ++j) {
    if (w[j] == 0.0) continue;  // subgradient at 0 is 0
    double sign = w[j] > 0.0 ? 1.0 : -1.0;
    out.grad_w[j] += sq_sum * sign / std::sqrt(std::abs(w[j]) + cfg.sqrt_smoothing);
  }
  out.value = sq_sum * sq_sum + c * g;
  return out;
}

namespace {

// Hard-split SSE decrease from precomputed projections; 0 on an empty side.
double hard_decrease(std::span<const double> proj, double threshold,
                     std::span<const double> residuals) {
  const std::size_t n = proj.size();
  std::size_t nl = 0, nr = 0;
  double sum_l = 0.0, sum_r = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (proj[i] <= threshold) {
      ++nl;
      sum_l += residuals[i];
    } else {
      ++nr;
      sum_r += residuals[i];
    }
  }
  if (nl == 0 || nr == 0) return 0.0;
  double mean = (sum_l + sum_r) / static_cast<double>(n);
  double mean_l = sum_l / static_cast<double>(nl);
  double mean_r = sum_r / static_cast<double>(nr);
  double parent = 0.0, left = 0.0, right = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = residuals[i] - mean;
    parent += d * d;
    if (proj[i] <= threshold) {
      double dl = residuals[i] - mean_l;
      left += dl * dl;
    } else {
      double dr = residuals[i] - mean_r;
      right += dr * dr;
    }
  }
  return parent - left - right;
}

}  // namespace

std::optional<ObliqueSplit> learn_oblique_split(
    const Matrix& X, std::span<const double> residuals,
    std::span<const std::size_t> node_rows,
    std::span<const std::size_t> beam, const SplitSearchConfig& cfg) {
  const std::size_t n = node_rows.size();
  const std::size_t k = beam.size();
  if (n < 2 || k == 0) return std::nullopt;

  Matrix X_sub(n, k);
  std::vector<double> r_sub(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) X_sub(i, j) = X(node_rows[i], beam[j]);
    r_sub[i] = residuals[node_rows[i]];
  }
  std::vector<double> centroid(k, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j) centroid[j] += X_sub(i, j);
  for (double& c : centroid) c /= static_cast<double>(n);

  std::vector<double> best_w;
  double best_b = 0.0;
  double best_dec = -1.0;

  std::vector<double> proj(n);
  auto project = [&](std::span<const double> w, double b) {
    for (std::size_t i = 0; i < n; ++i) {
      double z = b;
      for (std::size_t j = 0; j < k; ++j) z += w[j] * X_sub(i, j);
      proj[i] = z;
    }
  };

  for (int restart = 0; restart < cfg.restarts; ++restart) {
    Rng rng(derive_seed(cfg.seed, 0x0b71, static_cast<std::uint64_t>(restart)));
    std::vector<double> w(k);
    for (auto& wj : w) wj = rng.uniform(-kInitScale, kInitScale);
    // start with the hyperplane through the node centroid
    double b = 0.0;
    for (std::size_t j = 0; j < k; ++j) b -= w[j] * centroid[j];

    // Adam with a linearly decayed step. A plain fixed step either explodes
    // on the penalty's near-zero gradient spikes or orbits the sharp
    // fitness landscape without settling; the decay also shrinks the
    // oscillation band of uninformative weights so the relative pruning
    // below can remove them.
    std::vector<double> m(k, 0.0), v(k, 0.0);
    double mb = 0.0, vb = 0.0;
    const double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;

    // track the iterate whose hard split decreases SSE the most; on ties
    // prefer the later (more refined, sparser) iterate
    project(w, b);
    double track_dec = hard_decrease(proj, 0.0, r_sub);
    std::vector<double> track_w = w;
    double track_b = b;

    for (int t = 1; t <= cfg.gd_iterations; ++t) {
      ObjectiveEval eval = smoothed_objective(w, b, X_sub, r_sub, cfg);
      double lr = cfg.learning_rate *
                  (1.0 - (t - 1.0) / static_cast<double>(cfg.gd_iterations));
      double bc1 = 1.0 - std::pow(beta1, t);
      double bc2 = 1.0 - std::pow(beta2, t);
      for (std::size_t j = 0; j < k; ++j) {
        m[j] = beta1 * m[j] + (1.0 - beta1) * eval.grad_w[j];
        v[j] = beta2 * v[j] + (1.0 - beta2) * eval.grad_w[j] * eval.grad_w[j];
        double old = w[j];
        w[j] -= lr * (m[j] / bc1) / (std::sqrt(v[j] / bc2) + adam_eps);
        // a step that crosses zero parks the weight at exactly zero; the
        // penalty contributes no force there, so only a live fitness
        // gradient can move it off again
        if (old != 0.0 && ((old > 0.0) != (w[j] > 0.0))) w[j] = 0.0;
      }
      mb = beta1 * mb + (1.0 - beta1) * eval.grad_b;
      vb = beta2 * vb + (1.0 - beta2) * eval.grad_b * eval.grad_b;
      b -= lr * (mb / bc1) / (std::sqrt(vb / bc2) + adam_eps);

      project(w, b);
      double dec = hard_decrease(proj, 0.0, r_sub);
      if (dec >= track_dec) {
        track_dec = dec;
        track_w = w;
        track_b = b;
      }
    }
    if (track_dec > best_dec) {
      best_dec = track_dec;
      best_w = track_w;
      best_b = track_b;
    }
  }

  // prune weights small relative to the largest
  double max_abs = 0.0;
  for (double wj : best_w) max_abs = std::max(max_abs, std::abs(wj));
  if (max_abs == 0.0) return std::nullopt;
  for (double& wj : best_w)
    if (std::abs(wj) < cfg.sparsify_epsilon * max_abs) wj = 0.0;

  ObliqueSplit split;
  split.features.assign(beam.begin(), beam.end());
  split.weights = best_w;
  split.threshold = -best_b;

  // canonical orientation: first non-zero weight positive
  for (double wj : split.weights) {
    if (wj == 0.0) continue;
    if (wj < 0.0) {
      for (double& x : split.weights) x = -x;
      split.threshold = -split.threshold;
    }
    break;
  }

  std::size_t nl = 0;
  for (std::size_t row : node_rows)
    if (split.routes_left(X, row)) ++nl;
  if (nl == 0 || nl == n) return std::nullopt;
  return split;
}

double impurity_decrease(const ObliqueSplit& split, const Matrix& X,
                         std::span<const double> residuals,
                         std::span<const std::size_t> node_rows) {
  std::vector<double> left, right;
  left.reserve(node_rows.size());
  right.reserve(node_rows.size());
  std::vector<double> parent;
  parent.reserve(node_rows.size());
  for (std::size_t row : node_rows) {
    parent.push_back(residuals[row]);
    if (split.routes_left(X, row))
      left.push_back(residuals[row]);
    else
      right.push_back(residuals[row]);
  }
  if (left.empty() || right.empty()) return 0.0;
  return node_sse(parent) - node_sse(left) - node_sse(right);
}

std::optional<ScoredSplit> best_univariate_split(
    const Matrix& X, std::span<const double> residuals,
    std::span<const std::size_t> node_rows) {
  if (node_rows.size() < 2) return std::nullopt;

  std::optional<ScoredSplit> best;
  std::vector<std::pair<double, double>> pairs;  // (value, residual)
  for (std::size_t feature = 0; feature < X.cols(); ++feature) {
    pairs.clear();
    for (std::size_t row : node_rows)
      pairs.emplace_back(X(row, feature), residuals[row]);
    std::stable_sort(pairs.begin(), pairs.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 0; i + 1 < pairs.size(); ++i) {
      if (pairs[i].first == pairs[i + 1].first) continue;
      double threshold = 0.5 * (pairs[i].first + pairs[i + 1].first);
      ObliqueSplit split;
      split.features = {feature};
      split.weights = {1.0};
      split.threshold = threshold;
      double dec = impurity_decrease(split, X, residuals, node_rows);
      if (!best || dec > best->decrease) best = ScoredSplit{std::move(split), dec};
    }
  }
  return best;
}

}  // namespace rofigs
