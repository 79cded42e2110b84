#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace spknn {

// Ordered set of sites in R^N stored as one flat row-major buffer. Lattice
// sites carry pre-normalized coordinates i_r / n_r.
class SiteSet {
public:
  SiteSet() = default;
  SiteSet(std::size_t dim, std::vector<double> coords,
          std::optional<std::vector<std::size_t>> shape = std::nullopt);

  std::size_t size() const noexcept { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  std::size_t dim() const noexcept { return dim_; }
  bool empty() const noexcept { return size() == 0; }

  std::span<const double> operator[](std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  const std::vector<double>& flat() const noexcept { return coords_; }
  const std::optional<std::vector<std::size_t>>& shape() const noexcept { return shape_; }

  SiteSet subset(std::span<const std::size_t> indices) const;

  friend bool operator==(const SiteSet&, const SiteSet&) = default;

private:
  std::size_t dim_ = 0;
  std::vector<double> coords_;
  std::optional<std::vector<std::size_t>> shape_;
};

// All prod(shape) sites with coordinates i_r / n_r (1-based i_r), row-major
// with the last axis varying fastest.
SiteSet make_lattice(std::span<const std::size_t> shape);

double site_distance(std::span<const double> a, std::span<const double> b);

// No dimension check; for inner loops where dimensions are already validated.
inline double euclidean_unchecked(const double* a, const double* b, std::size_t dim) {
  double acc = 0.0;
  for (std::size_t r = 0; r < dim; ++r) {
    const double diff = a[r] - b[r];
    acc += diff * diff;
  }
  return std::sqrt(acc);
}

}  // namespace spknn
