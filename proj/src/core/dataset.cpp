#include "dataset.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "error.hpp"

namespace spknn {

SpatialDataset::SpatialDataset(SiteSet sites, std::size_t cov_dim, std::vector<double> covariates,
                               std::optional<std::vector<double>> responses,
                               std::optional<std::vector<int>> labels, LabelCoding coding)
    : sites_(std::move(sites)),
      cov_dim_(cov_dim),
      covariates_(std::move(covariates)),
      responses_(std::move(responses)),
      labels_(std::move(labels)),
      coding_(coding) {
  const std::size_t n = sites_.size();
  require(cov_dim_ >= 1, "covariate dimension must be at least 1");
  if (covariates_.size() != n * cov_dim_) {
    fail(ErrorCode::InvalidData, "covariate rows (" + std::to_string(covariates_.size() / cov_dim_) +
                                     ") do not match sites (" + std::to_string(n) + ")");
  }
  for (double v : covariates_) {
    if (!std::isfinite(v)) fail(ErrorCode::InvalidData, "covariates must be finite");
  }
  if (responses_) {
    if (responses_->size() != n) fail(ErrorCode::InvalidData, "response count does not match sites");
    for (double v : *responses_) {
      if (!std::isfinite(v)) fail(ErrorCode::InvalidData, "responses must be finite");
    }
  }
  if (labels_) {
    if (labels_->size() != n) fail(ErrorCode::InvalidData, "label count does not match sites");
    for (int c : *labels_) {
      if (c < 1) fail(ErrorCode::InvalidData, "class labels must be >= 1, got " + std::to_string(c));
      max_label_ = std::max(max_label_, c);
    }
  }
}

const std::vector<double>& SpatialDataset::responses() const {
  if (!responses_) fail(ErrorCode::InvalidState, "dataset has no responses");
  return *responses_;
}

const std::vector<int>& SpatialDataset::labels() const {
  if (!labels_) fail(ErrorCode::InvalidState, "dataset has no class labels");
  return *labels_;
}

SpatialDataset SpatialDataset::with_responses(std::vector<double> y) const {
  return SpatialDataset(sites_, cov_dim_, covariates_, std::move(y), labels_, coding_);
}

SpatialDataset SpatialDataset::with_labels(std::vector<int> labels) const {
  return SpatialDataset(sites_, cov_dim_, covariates_, responses_, std::move(labels), coding_);
}

SpatialDataset SpatialDataset::subset(std::span<const std::size_t> indices) const {
  std::vector<double> cov;
  cov.reserve(indices.size() * cov_dim_);
  std::optional<std::vector<double>> y;
  std::optional<std::vector<int>> lab;
  if (responses_) y.emplace();
  if (labels_) lab.emplace();
  for (std::size_t i : indices) {
    require(i < size(), "dataset index out of range");
    auto row = covariate(i);
    cov.insert(cov.end(), row.begin(), row.end());
    if (y) y->push_back((*responses_)[i]);
    if (lab) lab->push_back((*labels_)[i]);
  }
  return SpatialDataset(sites_.subset(indices), cov_dim_, std::move(cov), std::move(y), std::move(lab),
                        coding_);
}

}  // namespace spknn
