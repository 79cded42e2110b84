#include "estimator.hpp"

#include <cmath>
#include <string>

#include "error.hpp"

namespace spknn {

namespace {

struct Prepared {
  std::vector<char> mask;
  std::vector<double> cov_dist;
  std::vector<double> site_dist;
};

Prepared prepare(const SpatialDataset& data, std::span<const double> s0, std::span<const double> x,
                 std::span<const std::size_t> exclude) {
  const std::size_t n = data.size();
  if (n == 0) fail(ErrorCode::InvalidArgument, "dataset is empty");
  require(s0.size() == data.site_dim(), "prediction site dimension does not match the dataset");
  require(x.size() == data.cov_dim(), "covariate vector length does not match the dataset");

  Prepared p;
  p.mask = admissible_mask(n, exclude);
  p.cov_dist.resize(n);
  p.site_dist.resize(n);
  const auto cov = data.covariates();
  std::size_t admissible = 0;
  for (std::size_t i = 0; i < n; ++i) {
    p.site_dist[i] = euclidean_unchecked(data.sites()[i].data(), s0.data(), data.site_dim());
    if (p.site_dist[i] == 0.0) p.mask[i] = 0;
    p.cov_dist[i] = euclidean_unchecked(cov.row(i), x.data(), cov.dim);
    admissible += p.mask[i] ? 1 : 0;
  }
  if (admissible == 0) fail(ErrorCode::InvalidArgument, "no admissible observations for s0");
  return p;
}

WeightVector combine(const Prepared& p, double cov_bw, double site_bw, Kernel k1, Kernel k2) {
  const std::size_t n = p.mask.size();
  WeightVector out;
  out.weights.assign(n, 0.0);
  out.cov_bandwidth = cov_bw;
  out.site_bandwidth = site_bw;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!p.mask[i]) continue;
    const double w = eval_scalar(k1, detail::scaled_distance(p.cov_dist[i], cov_bw)) *
                     eval_scalar(k2, detail::scaled_distance(p.site_dist[i], site_bw));
    out.weights[i] = w;
    sum += w;
  }
  out.raw_sum = sum;
  if (sum > 0.0) {
    for (double& w : out.weights) w /= sum;
    out.normalized = true;
  }
  return out;
}

double weighted_or_mean(const SpatialDataset& data, const WeightVector& w, std::span<const char> mask) {
  const auto& y = data.responses();
  if (!w.normalized) return detail::admissible_mean(y, mask);
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) acc += w.weights[i] * y[i];
  return acc;
}

std::vector<double> scores_from_weights(const SpatialDataset& data, const WeightVector& w,
                                        int num_classes) {
  const auto& labels = data.labels();
  std::vector<double> scores(static_cast<std::size_t>(num_classes), 0.0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    scores[static_cast<std::size_t>(labels[i] - 1)] += w.weights[i];
  }
  return scores;
}

int vote(const SpatialDataset& data, const WeightVector& w, std::span<const char> mask, int num_classes) {
  if (!w.normalized) return detail::majority_label(data.labels(), mask, num_classes);
  const auto scores = scores_from_weights(data, w, num_classes);
  return detail::argmax_smallest(scores);
}

}  // namespace

namespace detail {

int argmax_smallest(std::span<const double> scores) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < scores.size(); ++j) {
    if (scores[j] > scores[best]) best = j;
  }
  return static_cast<int>(best) + 1;
}

int majority_label(std::span<const int> labels, std::span<const char> admissible, int num_classes) {
  std::vector<double> counts(static_cast<std::size_t>(num_classes), 0.0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (admissible[i]) counts[static_cast<std::size_t>(labels[i] - 1)] += 1.0;
  }
  return argmax_smallest(counts);
}

double admissible_mean(std::span<const double> y, std::span<const char> admissible) {
  double acc = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (admissible[i]) {
      acc += y[i];
      ++n;
    }
  }
  return n == 0 ? 0.0 : acc / static_cast<double>(n);
}

void check_labels(std::span<const int> labels, int num_classes) {
  require(num_classes >= 1, "number of classes must be positive");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 1 || labels[i] > num_classes) {
      fail(ErrorCode::InvalidData, "label " + std::to_string(labels[i]) + " at row " +
                                       std::to_string(i) + " outside 1.." +
                                       std::to_string(num_classes));
    }
  }
}

}  // namespace detail

WeightVector knn_weights(const SpatialDataset& data, std::span<const double> s0,
                         std::span<const double> x, const KnnParams& p,
                         std::span<const std::size_t> exclude) {
  const auto prep = prepare(data, s0, x, exclude);
  const double cov_bw = bandwidth_from_distances(prep.cov_dist, prep.mask, p.k).bandwidth;
  const double site_bw = bandwidth_from_distances(prep.site_dist, prep.mask, p.k_prime).bandwidth;
  return combine(prep, cov_bw, site_bw, p.k1, p.k2);
}

WeightVector nw_weights(const SpatialDataset& data, std::span<const double> s0,
                        std::span<const double> x, const NwParams& p,
                        std::span<const std::size_t> exclude) {
  require(p.h > 0.0 && p.rho > 0.0, "NW bandwidths h and rho must be positive");
  const auto prep = prepare(data, s0, x, exclude);
  return combine(prep, p.h, p.rho, p.k1, p.k2);
}

double predict(const SpatialDataset& data, std::span<const double> s0, std::span<const double> x,
               const KnnParams& p, std::span<const std::size_t> exclude) {
  (void)data.responses();
  const auto prep = prepare(data, s0, x, exclude);
  const double cov_bw = bandwidth_from_distances(prep.cov_dist, prep.mask, p.k).bandwidth;
  const double site_bw = bandwidth_from_distances(prep.site_dist, prep.mask, p.k_prime).bandwidth;
  return weighted_or_mean(data, combine(prep, cov_bw, site_bw, p.k1, p.k2), prep.mask);
}

double predict_nw(const SpatialDataset& data, std::span<const double> s0, std::span<const double> x,
                  const NwParams& p, std::span<const std::size_t> exclude) {
  (void)data.responses();
  require(p.h > 0.0 && p.rho > 0.0, "NW bandwidths h and rho must be positive");
  const auto prep = prepare(data, s0, x, exclude);
  return weighted_or_mean(data, combine(prep, p.h, p.rho, p.k1, p.k2), prep.mask);
}

RegressionParts regression_parts(const SpatialDataset& data, std::span<const double> s0,
                                 std::span<const double> x, const KnnParams& p,
                                 std::span<const std::size_t> exclude) {
  const auto& y = data.responses();
  const auto prep = prepare(data, s0, x, exclude);
  const double cov_bw = bandwidth_from_distances(prep.cov_dist, prep.mask, p.k).bandwidth;
  const double site_bw = bandwidth_from_distances(prep.site_dist, prep.mask, p.k_prime).bandwidth;

  double scale = static_cast<double>(data.size()) *
                 std::pow(site_bw, static_cast<double>(data.site_dim())) *
                 std::pow(cov_bw, static_cast<double>(data.cov_dim()));
  if (!(scale > 0.0) || !std::isfinite(scale)) scale = 1.0;

  RegressionParts out;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!prep.mask[i]) continue;
    const double w = eval_scalar(p.k1, detail::scaled_distance(prep.cov_dist[i], cov_bw)) *
                     eval_scalar(p.k2, detail::scaled_distance(prep.site_dist[i], site_bw));
    out.g += w * y[i];
    out.f += w;
  }
  out.g /= scale;
  out.f /= scale;
  out.fallback_mean = detail::admissible_mean(y, prep.mask);
  return out;
}

double regress(const SpatialDataset& data, std::span<const double> s0, std::span<const double> x,
               const KnnParams& p, std::span<const std::size_t> exclude) {
  const auto parts = regression_parts(data, s0, x, p, exclude);
  return parts.f != 0.0 ? parts.g / parts.f : parts.fallback_mean;
}

std::vector<double> class_scores(const SpatialDataset& data, std::span<const double> s0,
                                 std::span<const double> x, const KnnParams& p, int num_classes,
                                 std::span<const std::size_t> exclude) {
  detail::check_labels(data.labels(), num_classes);
  return scores_from_weights(data, knn_weights(data, s0, x, p, exclude), num_classes);
}

int classify(const SpatialDataset& data, std::span<const double> s0, std::span<const double> x,
             const KnnParams& p, int num_classes, std::span<const std::size_t> exclude) {
  detail::check_labels(data.labels(), num_classes);
  const auto prep = prepare(data, s0, x, exclude);
  const double cov_bw = bandwidth_from_distances(prep.cov_dist, prep.mask, p.k).bandwidth;
  const double site_bw = bandwidth_from_distances(prep.site_dist, prep.mask, p.k_prime).bandwidth;
  return vote(data, combine(prep, cov_bw, site_bw, p.k1, p.k2), prep.mask, num_classes);
}

int classify_nw(const SpatialDataset& data, std::span<const double> s0, std::span<const double> x,
                const NwParams& p, int num_classes, std::span<const std::size_t> exclude) {
  detail::check_labels(data.labels(), num_classes);
  require(p.h > 0.0 && p.rho > 0.0, "NW bandwidths h and rho must be positive");
  const auto prep = prepare(data, s0, x, exclude);
  return vote(data, combine(prep, p.h, p.rho, p.k1, p.k2), prep.mask, num_classes);
}

}  // namespace spknn
