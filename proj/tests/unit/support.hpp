#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <unistd.h>

#include "dataset.hpp"
#include "lattice.hpp"
#include "rng.hpp"

namespace testutil {

using spknn::Rng;
using spknn::SiteSet;
using spknn::SpatialDataset;

inline std::vector<double> uniform_vec(Rng& rng, std::size_t n, double lo = 0.0, double hi = 1.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = lo + (hi - lo) * rng.uniform();
  return v;
}

inline std::size_t uniform_int(Rng& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng.below(hi - lo + 1));
}

// Plain Euclidean distance, summed in coordinate order.
inline double dist(const double* a, const double* b, std::size_t dim) {
  double acc = 0.0;
  for (std::size_t r = 0; r < dim; ++r) acc += (a[r] - b[r]) * (a[r] - b[r]);
  return std::sqrt(acc);
}

// k-th smallest distance by full sort.
inline double sorted_kth(const std::vector<double>& pts, std::size_t dim, const double* q, std::size_t k,
                         const std::vector<std::size_t>& exclude = {}) {
  std::vector<double> d;
  for (std::size_t i = 0; i * dim < pts.size(); ++i) {
    if (std::find(exclude.begin(), exclude.end(), i) != exclude.end()) continue;
    d.push_back(dist(pts.data() + i * dim, q, dim));
  }
  std::sort(d.begin(), d.end());
  return d.at(k - 1);
}

// Random sites in [0,1]^N, covariates in [-1,1]^d, responses and labels.
inline SpatialDataset random_dataset(Rng& rng, std::size_t n, std::size_t site_dim, std::size_t cov_dim,
                                     int num_classes = 0) {
  auto sites = uniform_vec(rng, n * site_dim);
  auto cov = uniform_vec(rng, n * cov_dim, -1.0, 1.0);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < cov_dim; ++j) s += cov[i * cov_dim + j] * cov[i * cov_dim + j];
    y[i] = s + sites[i * site_dim] + 0.1 * rng.normal();
  }
  std::optional<std::vector<int>> labels;
  if (num_classes > 0) {
    labels.emplace(n);
    for (auto& l : *labels) l = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(num_classes)));
  }
  return SpatialDataset(SiteSet(site_dim, std::move(sites)), cov_dim, std::move(cov), std::move(y),
                        std::move(labels));
}

inline std::filesystem::path temp_dir() {
  auto p = std::filesystem::temp_directory_path() / ("spknn_tests_" + std::to_string(::getpid()));
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace testutil
