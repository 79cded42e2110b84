#include "neighbors.hpp"

#include <algorithm>
#include <string>

#include "error.hpp"

namespace spknn {

std::vector<char> admissible_mask(std::size_t n, std::span<const std::size_t> exclude) {
  std::vector<char> mask(n, 1);
  for (std::size_t i : exclude) {
    require(i < n, "excluded index " + std::to_string(i) + " out of range");
    mask[i] = 0;
  }
  return mask;
}

BandwidthResult bandwidth_from_distances(std::span<const double> dist, std::span<const char> admissible,
                                         std::size_t k) {
  require(k >= 1, "neighbor count k must be positive");
  std::vector<double> pool;
  pool.reserve(dist.size());
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (admissible[i]) pool.push_back(dist[i]);
  }
  if (pool.empty()) fail(ErrorCode::InvalidArgument, "no admissible points for neighbor search");
  if (k > pool.size()) {
    fail(ErrorCode::InvalidArgument, "k = " + std::to_string(k) + " exceeds the " +
                                         std::to_string(pool.size()) + " admissible points");
  }
  auto kth = pool.begin() + static_cast<std::ptrdiff_t>(k - 1);
  std::nth_element(pool.begin(), kth, pool.end());

  BandwidthResult out;
  out.bandwidth = *kth;
  out.degenerate = out.bandwidth == 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (admissible[i] && dist[i] <= out.bandwidth) out.neighbor_indices.push_back(i);
  }
  return out;
}

BandwidthResult knn_bandwidth(PointsView points, std::span<const double> query, std::size_t k,
                              std::span<const std::size_t> exclude) {
  const std::size_t n = points.size();
  if (n == 0) fail(ErrorCode::InvalidArgument, "empty point set");
  require(query.size() == points.dim, "query dimension does not match the points");
  std::vector<double> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    dist[i] = euclidean_unchecked(points.row(i), query.data(), points.dim);
  }
  const auto mask = admissible_mask(n, exclude);
  return bandwidth_from_distances(dist, mask, k);
}

BandwidthResult spatial_bandwidth(const SiteSet& sites, std::span<const double> s0,
                                  std::size_t k_prime, std::span<const std::size_t> exclude) {
  const std::size_t n = sites.size();
  if (n == 0) fail(ErrorCode::InvalidArgument, "empty site set");
  require(s0.size() == sites.dim(), "prediction site dimension does not match the sites");
  std::vector<double> dist(n);
  auto mask = admissible_mask(n, exclude);
  for (std::size_t i = 0; i < n; ++i) {
    dist[i] = euclidean_unchecked(sites[i].data(), s0.data(), sites.dim());
    if (dist[i] == 0.0) mask[i] = 0;
  }
  return bandwidth_from_distances(dist, mask, k_prime);
}

}  // namespace spknn
