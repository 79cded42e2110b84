#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dataset.hpp"
#include "rng.hpp"

namespace spknn {

// C(h) = variance * exp(-(|h| / scale)^2)
double gaussian_cov(std::span<const double> h, double variance, double scale);

struct FieldParams {
  double mean = 0.0;
  double variance = 1.0;
  double scale = 1.0;
  std::vector<std::size_t> shape;
};

// Dense Cholesky factor of the unit-variance Gaussian correlation over the
// raw integer grid positions of `shape`. Factor once, sample many times.
class GrfSampler {
public:
  static constexpr std::size_t kMaxSites = 4096;

  GrfSampler(std::vector<std::size_t> shape, double scale);

  std::size_t size() const noexcept { return n_; }
  const std::vector<std::size_t>& shape() const noexcept { return shape_; }
  double jitter() const noexcept { return jitter_; }

  // One draw, row-major over the grid.
  std::vector<double> sample(double mean, double variance, Rng& rng) const;

private:
  std::vector<std::size_t> shape_;
  std::size_t n_ = 0;
  double jitter_ = 0.0;
  std::vector<double> lower_;  // packed row-major lower triangle
};

std::vector<double> sample_grf(const FieldParams& p, std::uint64_t seed);

// U_s = (1 / #sites) * sum_t exp(-|s - t| / a) over raw grid positions.
std::vector<double> local_dependence_field(std::span<const std::size_t> shape, double a);

struct DgpParams {
  std::size_t rows = 25;
  std::size_t cols = 25;
  double a = 5.0;
  // Variance of the Z field (the second GRF argument).
  double z_variance = 0.1;
  std::uint64_t seed = 0;
  // Test hook: pin the Bernoulli mixture indicator A to 0 or 1.
  std::optional<int> force_mixture;
};

// Stream ids for derive_seed; fixed so datasets are reproducible.
enum class DgpStream : std::uint64_t { Mixture = 1, T = 2, Z = 3, Noise = 4 };

inline constexpr double kTVariance = 5.0;
inline constexpr double kNoiseVariance = 0.1;
inline constexpr double kFieldScale = 3.0;

// Shape- and a-dependent state shared across replications.
class DgpContext {
public:
  DgpContext(std::size_t rows, std::size_t cols, double a);

  SpatialDataset generate(double z_variance, std::uint64_t seed,
                          std::optional<int> force_mixture = std::nullopt) const;

  const std::vector<double>& u_field() const noexcept { return u_; }

private:
  std::size_t rows_;
  std::size_t cols_;
  GrfSampler sampler_;
  std::vector<double> u_;
  SiteSet sites_;
};

// d = 1 covariate X and response Y = X^2 + eps on the rows x cols lattice.
SpatialDataset gen_dataset(const DgpParams& p);

}  // namespace spknn
