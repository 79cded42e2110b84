#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "lattice.hpp"
#include "neighbors.hpp"

namespace spknn {

// How class labels were encoded in the source file. Internally classes are
// always 1..M; ZeroOne files store 0/1 and map 0 -> 1, 1 -> 2 (2 = presence).
enum class LabelCoding { Native, ZeroOne };

class SpatialDataset {
public:
  SpatialDataset() = default;
  SpatialDataset(SiteSet sites, std::size_t cov_dim, std::vector<double> covariates,
                 std::optional<std::vector<double>> responses = std::nullopt,
                 std::optional<std::vector<int>> labels = std::nullopt,
                 LabelCoding coding = LabelCoding::Native);

  std::size_t size() const noexcept { return sites_.size(); }
  std::size_t cov_dim() const noexcept { return cov_dim_; }
  std::size_t site_dim() const noexcept { return sites_.dim(); }

  const SiteSet& sites() const noexcept { return sites_; }
  PointsView covariates() const noexcept { return {covariates_, cov_dim_}; }
  std::span<const double> covariate(std::size_t i) const {
    return {covariates_.data() + i * cov_dim_, cov_dim_};
  }
  const std::vector<double>& covariates_flat() const noexcept { return covariates_; }

  bool has_responses() const noexcept { return responses_.has_value(); }
  bool has_labels() const noexcept { return labels_.has_value(); }
  // Throw InvalidState when absent.
  const std::vector<double>& responses() const;
  const std::vector<int>& labels() const;
  LabelCoding label_coding() const noexcept { return coding_; }
  // Largest class label present (0 without labels).
  int max_label() const noexcept { return max_label_; }

  SpatialDataset with_responses(std::vector<double> y) const;
  SpatialDataset with_labels(std::vector<int> labels) const;
  SpatialDataset subset(std::span<const std::size_t> indices) const;

  friend bool operator==(const SpatialDataset&, const SpatialDataset&) = default;

private:
  SiteSet sites_;
  std::size_t cov_dim_ = 0;
  std::vector<double> covariates_;
  std::optional<std::vector<double>> responses_;
  std::optional<std::vector<int>> labels_;
  LabelCoding coding_ = LabelCoding::Native;
  int max_label_ = 0;
};

}  // namespace spknn
