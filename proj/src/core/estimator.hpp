#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "dataset.hpp"
#include "kernels.hpp"

namespace spknn {

// k: covariate neighbors, k_prime: site neighbors.
struct KnnParams {
  std::size_t k = 1;
  std::size_t k_prime = 1;
  Kernel k1 = Kernel::Epanechnikov;
  Kernel k2 = Kernel::Parzen;

  friend bool operator==(const KnnParams&, const KnnParams&) = default;
};

// Fixed covariate bandwidth h and site bandwidth rho.
struct NwParams {
  double h = 1.0;
  double rho = 1.0;
  Kernel k1 = Kernel::Epanechnikov;
  Kernel k2 = Kernel::Parzen;

  friend bool operator==(const NwParams&, const NwParams&) = default;
};

struct WeightVector {
  std::vector<double> weights;
  // false when every raw product weight vanished; weights are then all zero
  bool normalized = false;
  double raw_sum = 0.0;
  double cov_bandwidth = 0.0;
  double site_bandwidth = 0.0;
};

// Observations located exactly at s0 are treated as s0 itself and are
// excluded, in addition to the explicit `exclude` indices.
WeightVector knn_weights(const SpatialDataset& data, std::span<const double> s0,
                         std::span<const double> x, const KnnParams& p,
                         std::span<const std::size_t> exclude = {});

WeightVector nw_weights(const SpatialDataset& data, std::span<const double> s0,
                        std::span<const double> x, const NwParams& p,
                        std::span<const std::size_t> exclude = {});

// Weighted mean of the responses; empirical mean of the admissible
// responses when every weight vanishes.
double predict(const SpatialDataset& data, std::span<const double> s0, std::span<const double> x,
               const KnnParams& p, std::span<const std::size_t> exclude = {});

double predict_nw(const SpatialDataset& data, std::span<const double> s0, std::span<const double> x,
                  const NwParams& p, std::span<const std::size_t> exclude = {});

// g_n / f_n with the explicit normalizations 1 / (n h^N H^d).
struct RegressionParts {
  double g = 0.0;
  double f = 0.0;
  double fallback_mean = 0.0;
};
RegressionParts regression_parts(const SpatialDataset& data, std::span<const double> s0,
                                 std::span<const double> x, const KnnParams& p,
                                 std::span<const std::size_t> exclude = {});
double regress(const SpatialDataset& data, std::span<const double> s0, std::span<const double> x,
               const KnnParams& p, std::span<const std::size_t> exclude = {});

// score_j = sum of normalized weights over observations labeled j, j = 1..M
// (index j-1 in the returned vector).
std::vector<double> class_scores(const SpatialDataset& data, std::span<const double> s0,
                                 std::span<const double> x, const KnnParams& p, int num_classes,
                                 std::span<const std::size_t> exclude = {});

// argmax of class_scores, smallest label on ties. All-zero weights fall back
// to the majority class of the admissible training labels.
int classify(const SpatialDataset& data, std::span<const double> s0, std::span<const double> x,
             const KnnParams& p, int num_classes, std::span<const std::size_t> exclude = {});

int classify_nw(const SpatialDataset& data, std::span<const double> s0, std::span<const double> x,
                const NwParams& p, int num_classes, std::span<const std::size_t> exclude = {});

// Shared helpers, also used by the leave-one-out engine.
namespace detail {

// d / bw with the 0/0 -> 0 convention for a degenerate bandwidth.
inline double scaled_distance(double d, double bw) {
  if (bw > 0.0) return d / bw;
  return d == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

int argmax_smallest(std::span<const double> scores);
int majority_label(std::span<const int> labels, std::span<const char> admissible, int num_classes);
double admissible_mean(std::span<const double> y, std::span<const char> admissible);
void check_labels(std::span<const int> labels, int num_classes);

}  // namespace detail

}  // namespace spknn
