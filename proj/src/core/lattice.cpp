#include "lattice.hpp"

#include <cmath>
#include <string>

#include "error.hpp"

namespace spknn {

SiteSet::SiteSet(std::size_t dim, std::vector<double> coords,
                 std::optional<std::vector<std::size_t>> shape)
    : dim_(dim), coords_(std::move(coords)), shape_(std::move(shape)) {
  require(dim_ >= 1, "site dimension must be at least 1");
  require(coords_.size() % dim_ == 0, "coordinate buffer length is not a multiple of the dimension");
  for (double c : coords_) {
    if (!std::isfinite(c)) fail(ErrorCode::InvalidData, "site coordinates must be finite");
  }
  if (shape_) {
    require(shape_->size() == dim_, "lattice shape rank must equal site dimension");
    std::size_t total = 1;
    for (std::size_t n : *shape_) total *= n;
    require(total == size(), "lattice shape does not match the number of sites");
  }
}

SiteSet SiteSet::subset(std::span<const std::size_t> indices) const {
  std::vector<double> out;
  out.reserve(indices.size() * dim_);
  for (std::size_t i : indices) {
    require(i < size(), "site index out of range");
    auto row = (*this)[i];
    out.insert(out.end(), row.begin(), row.end());
  }
  return SiteSet(dim_, std::move(out));
}

SiteSet make_lattice(std::span<const std::size_t> shape) {
  require(!shape.empty(), "lattice shape must have at least one dimension");
  std::size_t total = 1;
  for (std::size_t n : shape) {
    require(n >= 1, "lattice dimensions must be positive");
    total *= n;
  }
  const std::size_t dim = shape.size();
  std::vector<double> coords(total * dim);
  std::vector<std::size_t> idx(dim, 1);
  for (std::size_t s = 0; s < total; ++s) {
    for (std::size_t r = 0; r < dim; ++r) {
      coords[s * dim + r] = static_cast<double>(idx[r]) / static_cast<double>(shape[r]);
    }
    // odometer increment, last axis fastest
    for (std::size_t r = dim; r-- > 0;) {
      if (++idx[r] <= shape[r]) break;
      idx[r] = 1;
    }
  }
  return SiteSet(dim, std::move(coords), std::vector<std::size_t>(shape.begin(), shape.end()));
}

double site_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    fail(ErrorCode::InvalidArgument, "site dimension mismatch: " + std::to_string(a.size()) +
                                         " vs " + std::to_string(b.size()));
  }
  return euclidean_unchecked(a.data(), b.data(), a.size());
}

}  // namespace spknn
