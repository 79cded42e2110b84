#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lattice.hpp"

namespace spknn {

// Non-owning view over n points of dimension dim, stored row-major.
struct PointsView {
  std::span<const double> data;
  std::size_t dim = 1;

  std::size_t size() const noexcept { return dim == 0 ? 0 : data.size() / dim; }
  const double* row(std::size_t i) const noexcept { return data.data() + i * dim; }
};

inline PointsView view_of(const SiteSet& s) { return {s.flat(), s.dim()}; }

struct BandwidthResult {
  double bandwidth = 0.0;
  // every admissible index whose distance is <= bandwidth, ascending
  std::vector<std::size_t> neighbor_indices;
  // bandwidth == 0: at least k admissible points coincide with the query
  bool degenerate = false;
};

// k-th order statistic of the distances from `query` to the admissible
// points (those not listed in `exclude`).
BandwidthResult knn_bandwidth(PointsView points, std::span<const double> query, std::size_t k,
                              std::span<const std::size_t> exclude = {});

// k'-th nearest site distance from s0. Sites located exactly at s0 are s0
// itself and never count as neighbors.
BandwidthResult spatial_bandwidth(const SiteSet& sites, std::span<const double> s0,
                                  std::size_t k_prime, std::span<const std::size_t> exclude = {});

// Admissibility mask: false for excluded indices.
std::vector<char> admissible_mask(std::size_t n, std::span<const std::size_t> exclude);

// Bandwidth from a precomputed distance array over an admissibility mask.
BandwidthResult bandwidth_from_distances(std::span<const double> dist, std::span<const char> admissible,
                                         std::size_t k);

}  // namespace spknn
