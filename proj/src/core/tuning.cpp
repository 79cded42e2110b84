#include "tuning.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>
#include <utility>

#include "error.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace spknn {

namespace {

std::vector<std::size_t> power_grid(std::size_t n, double lo, double hi) {
  std::vector<std::size_t> out;
  if (n < 2) return {1};
  for (int step = 0;; ++step) {
    const double g = lo + 0.05 * step;
    if (g > hi + 1e-9) break;
    auto v = static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(n), g)));
    out.push_back(std::clamp<std::size_t>(v, 1, n - 1));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::size_t kernel_rank(Kernel k) { return static_cast<std::size_t>(k); }

}  // namespace

std::vector<std::size_t> default_k_values(std::size_t n) { return power_grid(n, 0.20, 1.00); }
std::vector<std::size_t> default_k_prime_values(std::size_t n) { return power_grid(n, 0.20, 1.00); }

std::vector<double> default_bandwidths(PointsView points, std::size_t count) {
  const std::size_t n = points.size();
  require(n >= 2, "bandwidth grid needs at least two points");
  require(count >= 1, "bandwidth grid needs at least one value");
  std::vector<double> d;
  d.reserve(n * (n - 1) / 2);
  double min_positive = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = euclidean_unchecked(points.row(i), points.row(j), points.dim);
      d.push_back(v);
      if (v > 0.0) min_positive = std::min(min_positive, v);
    }
  }
  if (!std::isfinite(min_positive)) fail(ErrorCode::InvalidData, "all points coincide; no bandwidth scale");
  auto quantile = [&](double q) {
    auto pos = static_cast<std::size_t>(std::floor(q * static_cast<double>(d.size() - 1)));
    std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(pos), d.end());
    return d[pos];
  };
  double lo = quantile(0.01);
  double hi = quantile(1.00);
  if (lo <= 0.0) lo = min_positive;
  if (hi < lo) hi = lo;
  if (count == 1) return {hi};
  std::vector<double> out(count);
  for (std::size_t m = 0; m < count; ++m) {
    out[m] = lo * std::pow(hi / lo, static_cast<double>(m) / static_cast<double>(count - 1));
  }
  out.back() = hi;
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

ParamGrid with_defaults(ParamGrid grid, const SpatialDataset& data) {
  const std::size_t n = data.size();
  if (grid.k_values.empty()) grid.k_values = default_k_values(n);
  if (grid.k_prime_values.empty()) grid.k_prime_values = default_k_prime_values(n);
  if (grid.h_values.empty()) grid.h_values = default_bandwidths(data.covariates());
  if (grid.rho_values.empty()) grid.rho_values = default_bandwidths(view_of(data.sites()));
  return grid;
}

std::vector<KnnParams> expand_knn(const ParamGrid& grid) {
  std::vector<KnnParams> out;
  for (auto k : grid.k_values)
    for (auto kp : grid.k_prime_values)
      for (auto k1 : grid.k1_specs)
        for (auto k2 : grid.k2_specs) out.push_back({k, kp, k1, k2});
  auto key = [](const KnnParams& p) {
    return std::make_tuple(p.k, p.k_prime, kernel_rank(p.k1), kernel_rank(p.k2));
  };
  std::sort(out.begin(), out.end(), [&](const auto& a, const auto& b) { return key(a) < key(b); });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<NwParams> expand_nw(const ParamGrid& grid) {
  std::vector<NwParams> out;
  for (auto h : grid.h_values)
    for (auto rho : grid.rho_values)
      for (auto k1 : grid.k1_specs)
        for (auto k2 : grid.k2_specs) out.push_back({h, rho, k1, k2});
  auto key = [](const NwParams& p) {
    return std::make_tuple(p.h, p.rho, kernel_rank(p.k1), kernel_rank(p.k2));
  };
  std::sort(out.begin(), out.end(), [&](const auto& a, const auto& b) { return key(a) < key(b); });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Leave-one-out engine

struct LooEngine::SiteView {
  std::size_t index = 0;
  std::vector<char> mask;
  std::vector<double> cov_dist;
  std::vector<double> cov_sorted;                       // admissible only
  std::vector<std::pair<double, std::size_t>> by_site;  // admissible, nearest first

  double cov_order_stat(std::size_t k) const {
    if (k < 1 || k > cov_sorted.size()) {
      fail(ErrorCode::InvalidArgument, "k = " + std::to_string(k) + " exceeds the " +
                                           std::to_string(cov_sorted.size()) +
                                           " admissible points in leave-one-out");
    }
    return cov_sorted[k - 1];
  }
  double site_order_stat(std::size_t k) const {
    if (k < 1 || k > by_site.size()) {
      fail(ErrorCode::InvalidArgument, "k' = " + std::to_string(k) + " exceeds the " +
                                           std::to_string(by_site.size()) +
                                           " admissible sites in leave-one-out");
    }
    return by_site[k - 1].first;
  }

  // Calls acc(j, w) for every admissible j with a potentially nonzero weight.
  template <class Acc>
  void accumulate(double cov_bw, double site_bw, Kernel k1, Kernel k2, Acc&& acc) const {
    const bool compact = has_compact_support(k2);
    for (const auto& [sd, j] : by_site) {
      const double u2 = detail::scaled_distance(sd, site_bw);
      if (compact && !(u2 <= 1.0)) break;
      const double w = eval_scalar(k1, detail::scaled_distance(cov_dist[j], cov_bw)) * eval_scalar(k2, u2);
      acc(j, w);
    }
  }
};

LooEngine::LooEngine(const SpatialDataset& data, unsigned threads) : data_(data), threads_(threads) {
  require(data_.size() >= 2, "leave-one-out needs at least two observations");
}

template <class Fn>
void LooEngine::for_each_site(Fn&& fn) const {
  const std::size_t n = data_.size();
  const auto cov = data_.covariates();
  const auto& sites = data_.sites();
  parallel_for(n, threads_, [&](std::size_t i) {
    SiteView v;
    v.index = i;
    v.mask.assign(n, 1);
    v.cov_dist.resize(n);
    v.cov_sorted.reserve(n);
    v.by_site.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double sd = euclidean_unchecked(sites[j].data(), sites[i].data(), sites.dim());
      v.cov_dist[j] = euclidean_unchecked(cov.row(j), cov.row(i), cov.dim);
      if (j == i || sd == 0.0) {
        v.mask[j] = 0;
        continue;
      }
      v.cov_sorted.push_back(v.cov_dist[j]);
      v.by_site.emplace_back(sd, j);
    }
    if (v.by_site.empty()) {
      fail(ErrorCode::InvalidData, "site " + std::to_string(i) + " has no admissible neighbors");
    }
    std::sort(v.cov_sorted.begin(), v.cov_sorted.end());
    std::sort(v.by_site.begin(), v.by_site.end());
    fn(v);
  });
}

namespace {

// Reduces an n x C matrix of per-site values to per-candidate means, summing
// in site order.
std::vector<double> column_means(const std::vector<double>& m, std::size_t n, std::size_t c) {
  std::vector<double> out(c, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < c; ++j) out[j] += m[i * c + j];
  for (double& v : out) v /= static_cast<double>(n);
  return out;
}

}  // namespace

std::vector<double> LooEngine::knn_mae(std::span<const KnnParams> candidates) const {
  const auto& y = data_.responses();
  const std::size_t n = data_.size();
  const std::size_t c = candidates.size();
  std::vector<double> err(n * c);
  for_each_site([&](const SiteView& v) {
    const double fallback = detail::admissible_mean(y, v.mask);
    for (std::size_t ci = 0; ci < c; ++ci) {
      const auto& p = candidates[ci];
      double num = 0.0;
      double den = 0.0;
      v.accumulate(v.cov_order_stat(p.k), v.site_order_stat(p.k_prime), p.k1, p.k2,
                   [&](std::size_t j, double w) {
                     num += w * y[j];
                     den += w;
                   });
      const double pred = den > 0.0 ? num / den : fallback;
      err[v.index * c + ci] = std::fabs(y[v.index] - pred);
    }
  });
  return column_means(err, n, c);
}

std::vector<double> LooEngine::nw_mae(std::span<const NwParams> candidates) const {
  const auto& y = data_.responses();
  const std::size_t n = data_.size();
  const std::size_t c = candidates.size();
  for (const auto& p : candidates) require(p.h > 0.0 && p.rho > 0.0, "NW bandwidths must be positive");
  std::vector<double> err(n * c);
  for_each_site([&](const SiteView& v) {
    const double fallback = detail::admissible_mean(y, v.mask);
    for (std::size_t ci = 0; ci < c; ++ci) {
      const auto& p = candidates[ci];
      double num = 0.0;
      double den = 0.0;
      v.accumulate(p.h, p.rho, p.k1, p.k2, [&](std::size_t j, double w) {
        num += w * y[j];
        den += w;
      });
      const double pred = den > 0.0 ? num / den : fallback;
      err[v.index * c + ci] = std::fabs(y[v.index] - pred);
    }
  });
  return column_means(err, n, c);
}

namespace {

template <class Site, class BandwidthFn>
void ccr_candidates(const Site& v, const std::vector<int>& labels, int num_classes, std::size_t c,
                    BandwidthFn&& bandwidths, std::vector<double>& hit) {
  const int fallback = detail::majority_label(labels, v.mask, num_classes);
  std::vector<double> scores(static_cast<std::size_t>(num_classes));
  for (std::size_t ci = 0; ci < c; ++ci) {
    std::fill(scores.begin(), scores.end(), 0.0);
    double den = 0.0;
    const auto [cov_bw, site_bw, k1, k2] = bandwidths(ci);
    v.accumulate(cov_bw, site_bw, k1, k2, [&](std::size_t j, double w) {
      scores[static_cast<std::size_t>(labels[j] - 1)] += w;
      den += w;
    });
    const int pred = den > 0.0 ? detail::argmax_smallest(scores) : fallback;
    hit[v.index * c + ci] = pred == labels[v.index] ? 1.0 : 0.0;
  }
}

}  // namespace

std::vector<double> LooEngine::knn_ccr(std::span<const KnnParams> candidates, int num_classes) const {
  const auto& labels = data_.labels();
  detail::check_labels(labels, num_classes);
  const std::size_t n = data_.size();
  const std::size_t c = candidates.size();
  std::vector<double> hit(n * c);
  for_each_site([&](const SiteView& v) {
    ccr_candidates(v, labels, num_classes, c, [&](std::size_t ci) {
      const auto& p = candidates[ci];
      return std::make_tuple(v.cov_order_stat(p.k), v.site_order_stat(p.k_prime), p.k1, p.k2);
    }, hit);
  });
  return column_means(hit, n, c);
}

std::vector<double> LooEngine::nw_ccr(std::span<const NwParams> candidates, int num_classes) const {
  const auto& labels = data_.labels();
  detail::check_labels(labels, num_classes);
  for (const auto& p : candidates) require(p.h > 0.0 && p.rho > 0.0, "NW bandwidths must be positive");
  const std::size_t n = data_.size();
  const std::size_t c = candidates.size();
  std::vector<double> hit(n * c);
  for_each_site([&](const SiteView& v) {
    ccr_candidates(v, labels, num_classes, c, [&](std::size_t ci) {
      const auto& p = candidates[ci];
      return std::make_tuple(p.h, p.rho, p.k1, p.k2);
    }, hit);
  });
  return column_means(hit, n, c);
}

std::vector<double> LooEngine::knn_predictions(const KnnParams& p) const {
  const auto& y = data_.responses();
  std::vector<double> out(data_.size());
  for_each_site([&](const SiteView& v) {
    double num = 0.0;
    double den = 0.0;
    v.accumulate(v.cov_order_stat(p.k), v.site_order_stat(p.k_prime), p.k1, p.k2,
                 [&](std::size_t j, double w) {
                   num += w * y[j];
                   den += w;
                 });
    out[v.index] = den > 0.0 ? num / den : detail::admissible_mean(y, v.mask);
  });
  return out;
}

std::vector<int> LooEngine::knn_classes(const KnnParams& p, int num_classes) const {
  const auto& labels = data_.labels();
  detail::check_labels(labels, num_classes);
  std::vector<int> out(data_.size());
  for_each_site([&](const SiteView& v) {
    std::vector<double> scores(static_cast<std::size_t>(num_classes), 0.0);
    double den = 0.0;
    v.accumulate(v.cov_order_stat(p.k), v.site_order_stat(p.k_prime), p.k1, p.k2,
                 [&](std::size_t j, double w) {
                   scores[static_cast<std::size_t>(labels[j] - 1)] += w;
                   den += w;
                 });
    out[v.index] = den > 0.0 ? detail::argmax_smallest(scores)
                             : detail::majority_label(labels, v.mask, num_classes);
  });
  return out;
}

double loo_score(const SpatialDataset& data, const KnnParams& p, unsigned threads) {
  return LooEngine(data, threads).knn_mae(std::span(&p, 1)).front();
}

double loo_score(const SpatialDataset& data, const NwParams& p, unsigned threads) {
  return LooEngine(data, threads).nw_mae(std::span(&p, 1)).front();
}

namespace {

template <class Params, class Better>
Selection<Params> pick(std::vector<Params> candidates, std::vector<double> scores, Better better) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (better(scores[i], scores[best])) best = i;
  }
  Selection<Params> s;
  s.params = candidates[best];
  s.score = scores[best];
  s.candidates = std::move(candidates);
  s.scores = std::move(scores);
  return s;
}

void require_nonempty_knn(const ParamGrid& g) {
  if (g.k_values.empty() || g.k_prime_values.empty() || g.k1_specs.empty() || g.k2_specs.empty()) {
    fail(ErrorCode::InvalidArgument, "kNN parameter grid is empty");
  }
}

void require_nonempty_nw(const ParamGrid& g) {
  if (g.h_values.empty() || g.rho_values.empty() || g.k1_specs.empty() || g.k2_specs.empty()) {
    fail(ErrorCode::InvalidArgument, "NW parameter grid is empty");
  }
}

}  // namespace

Selection<KnnParams> cv_select_knn(const SpatialDataset& data, const ParamGrid& grid, unsigned threads) {
  require_nonempty_knn(grid);
  auto cands = expand_knn(grid);
  auto scores = LooEngine(data, threads).knn_mae(cands);
  return pick(std::move(cands), std::move(scores), std::less<double>{});
}

Selection<NwParams> cv_select_nw(const SpatialDataset& data, const ParamGrid& grid, unsigned threads) {
  require_nonempty_nw(grid);
  auto cands = expand_nw(grid);
  auto scores = LooEngine(data, threads).nw_mae(cands);
  return pick(std::move(cands), std::move(scores), std::less<double>{});
}

Selection<KnnParams> cv_select_knn_ccr(const SpatialDataset& data, const ParamGrid& grid, int num_classes,
                                       unsigned threads) {
  require_nonempty_knn(grid);
  auto cands = expand_knn(grid);
  auto scores = LooEngine(data, threads).knn_ccr(cands, num_classes);
  return pick(std::move(cands), std::move(scores), std::greater<double>{});
}

Selection<NwParams> cv_select_nw_ccr(const SpatialDataset& data, const ParamGrid& grid, int num_classes,
                                     unsigned threads) {
  require_nonempty_nw(grid);
  auto cands = expand_nw(grid);
  auto scores = LooEngine(data, threads).nw_ccr(cands, num_classes);
  return pick(std::move(cands), std::move(scores), std::greater<double>{});
}

Split stratified_split(const SpatialDataset& data, double train_fraction, std::uint64_t seed) {
  require(train_fraction > 0.0 && train_fraction < 1.0, "train fraction must lie in (0, 1)");
  const auto& labels = data.labels();
  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(i);

  Split s;
  for (auto& [label, idx] : members) {
    const std::size_t count = idx.size();
    if (count < 2) {
      s.warnings.push_back("class " + std::to_string(label) + " has fewer than 2 members; assigned to train");
      s.train.insert(s.train.end(), idx.begin(), idx.end());
      continue;
    }
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(label)));
    for (std::size_t i = count - 1; i > 0; --i) {
      std::swap(idx[i], idx[rng.below(i + 1)]);
    }
    auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(count)));
    n_train = std::clamp<std::size_t>(n_train, 1, count - 1);
    s.train.insert(s.train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    s.test.insert(s.test.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  }
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

}  // namespace spknn
