#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "estimator.hpp"

namespace spknn {

enum class Method { Knn, Nw };

// Smoothing-parameter grid. The kNN method reads k/k'/kernels, the NW method
// h/rho/kernels.
struct ParamGrid {
  std::vector<std::size_t> k_values;
  std::vector<std::size_t> k_prime_values;
  std::vector<Kernel> k1_specs{Kernel::Epanechnikov};
  std::vector<Kernel> k2_specs{Kernel::Parzen};
  std::vector<double> h_values;
  std::vector<double> rho_values;
};

// ceil(n^g) for g in {0.20, 0.25, ..., 1.00}, clamped to [1, n - 1] and
// deduplicated. The same ladder serves k and k'.
std::vector<std::size_t> default_k_values(std::size_t n);
std::vector<std::size_t> default_k_prime_values(std::size_t n);

// Geometric grid of `count` values from the 1st percentile of the pairwise
// distances (smallest positive distance if that is 0) up to the largest one.
std::vector<double> default_bandwidths(PointsView points, std::size_t count = 17);

// Fills empty k/k'/h/rho lists of `grid` with the defaults for `data`.
ParamGrid with_defaults(ParamGrid grid, const SpatialDataset& data);

// Candidates in tie-break order (k, k', K1, K2 ascending / catalog order),
// duplicates removed.
std::vector<KnnParams> expand_knn(const ParamGrid& grid);
std::vector<NwParams> expand_nw(const ParamGrid& grid);

// Leave-one-out evaluation of many candidates with shared per-site work.
// Every site is predicted from all other sites (and never from sites sharing
// its coordinates); bandwidths are recomputed without it.
class LooEngine {
public:
  explicit LooEngine(const SpatialDataset& data, unsigned threads = 1);

  std::vector<double> knn_mae(std::span<const KnnParams> candidates) const;
  std::vector<double> nw_mae(std::span<const NwParams> candidates) const;
  std::vector<double> knn_ccr(std::span<const KnnParams> candidates, int num_classes) const;
  std::vector<double> nw_ccr(std::span<const NwParams> candidates, int num_classes) const;

  std::vector<double> knn_predictions(const KnnParams& p) const;
  std::vector<int> knn_classes(const KnnParams& p, int num_classes) const;

private:
  struct SiteView;
  template <class Fn>
  void for_each_site(Fn&& fn) const;

  const SpatialDataset& data_;
  unsigned threads_;
};

double loo_score(const SpatialDataset& data, const KnnParams& p, unsigned threads = 1);
double loo_score(const SpatialDataset& data, const NwParams& p, unsigned threads = 1);

template <class Params>
struct Selection {
  Params params;
  double score = 0.0;
  std::vector<Params> candidates;
  std::vector<double> scores;
};

// Exhaustive argmin of the LOO MAE; first candidate in tie-break order wins.
Selection<KnnParams> cv_select_knn(const SpatialDataset& data, const ParamGrid& grid, unsigned threads = 1);
Selection<NwParams> cv_select_nw(const SpatialDataset& data, const ParamGrid& grid, unsigned threads = 1);

// Exhaustive argmax of the LOO correct classification rate.
Selection<KnnParams> cv_select_knn_ccr(const SpatialDataset& data, const ParamGrid& grid, int num_classes,
                                       unsigned threads = 1);
Selection<NwParams> cv_select_nw_ccr(const SpatialDataset& data, const ParamGrid& grid, int num_classes,
                                     unsigned threads = 1);

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  std::vector<std::string> warnings;
};

// Per-class proportional split; each class with >= 2 members lands in both
// parts. Index lists are ascending.
Split stratified_split(const SpatialDataset& data, double train_fraction, std::uint64_t seed);

}  // namespace spknn
