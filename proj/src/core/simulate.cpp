#include "simulate.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cmath>
#include <string>

#include "error.hpp"

namespace spknn {

namespace {

std::vector<std::vector<double>> grid_positions(std::span<const std::size_t> shape) {
  std::size_t total = 1;
  for (std::size_t n : shape) {
    require(n >= 1, "grid dimensions must be positive");
    total *= n;
  }
  std::vector<std::vector<double>> pos(total, std::vector<double>(shape.size()));
  std::vector<std::size_t> idx(shape.size(), 1);
  for (std::size_t s = 0; s < total; ++s) {
    for (std::size_t r = 0; r < shape.size(); ++r) pos[s][r] = static_cast<double>(idx[r]);
    for (std::size_t r = shape.size(); r-- > 0;) {
      if (++idx[r] <= shape[r]) break;
      idx[r] = 1;
    }
  }
  return pos;
}

}  // namespace

double gaussian_cov(std::span<const double> h, double variance, double scale) {
  require(scale > 0.0, "covariance scale must be positive");
  double norm2 = 0.0;
  for (double c : h) norm2 += c * c;
  return variance * std::exp(-norm2 / (scale * scale));
}

GrfSampler::GrfSampler(std::vector<std::size_t> shape, double scale) : shape_(std::move(shape)) {
  require(!shape_.empty(), "grid shape must be nonempty");
  require(scale > 0.0, "GRF scale must be positive");
  const auto pos = grid_positions(shape_);
  n_ = pos.size();
  if (n_ > kMaxSites) {
    fail(ErrorCode::InvalidArgument, "grid of " + std::to_string(n_) +
                                         " sites exceeds the dense-factorization limit of " +
                                         std::to_string(kMaxSites));
  }

  Eigen::MatrixXd corr(n_, n_);
  std::vector<double> diff(shape_.size());
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      for (std::size_t r = 0; r < diff.size(); ++r) diff[r] = pos[i][r] - pos[j][r];
      const double c = gaussian_cov(diff, 1.0, scale);
      corr(i, j) = c;
      corr(j, i) = c;
    }
  }

  // Smooth covariances are numerically singular on dense grids; retry with a
  // growing diagonal jitter, 1e-10 up to 1e-6 (relative to unit variance).
  Eigen::LLT<Eigen::MatrixXd> llt(corr);
  double jitter = 1e-10;
  while (llt.info() != Eigen::Success) {
    if (jitter > 1e-6 * (1.0 + 1e-9)) {
      fail(ErrorCode::Numerical, "covariance factorization failed with jitter up to 1e-6");
    }
    Eigen::MatrixXd bumped = corr;
    bumped.diagonal().array() += jitter;
    llt.compute(bumped);
    jitter_ = jitter;
    jitter *= 10.0;
  }

  const Eigen::MatrixXd lower = llt.matrixL();
  lower_.resize(n_ * (n_ + 1) / 2);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j <= i; ++j) lower_[k++] = lower(i, j);
  }
}

std::vector<double> GrfSampler::sample(double mean, double variance, Rng& rng) const {
  require(variance >= 0.0, "GRF variance must be nonnegative");
  std::vector<double> z(n_);
  for (double& v : z) v = rng.normal();
  const double sd = std::sqrt(variance);
  std::vector<double> out(n_);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j <= i; ++j) acc += lower_[k++] * z[j];
    out[i] = mean + sd * acc;
  }
  return out;
}

std::vector<double> sample_grf(const FieldParams& p, std::uint64_t seed) {
  require(p.variance > 0.0, "GRF variance must be positive");
  GrfSampler sampler(p.shape, p.scale);
  Rng rng(seed);
  return sampler.sample(p.mean, p.variance, rng);
}

std::vector<double> local_dependence_field(std::span<const std::size_t> shape, double a) {
  require(a > 0.0, "dependence radius a must be positive");
  const auto pos = grid_positions(shape);
  const std::size_t n = pos.size();
  std::vector<double> u(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    double acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      double d2 = 0.0;
      for (std::size_t r = 0; r < shape.size(); ++r) {
        const double diff = pos[s][r] - pos[t][r];
        d2 += diff * diff;
      }
      acc += std::exp(-std::sqrt(d2) / a);
    }
    u[s] = acc / static_cast<double>(n);
  }
  return u;
}

DgpContext::DgpContext(std::size_t rows, std::size_t cols, double a)
    : rows_(rows),
      cols_(cols),
      sampler_({rows, cols}, kFieldScale),
      u_(local_dependence_field(std::vector<std::size_t>{rows, cols}, a)),
      sites_(make_lattice(std::vector<std::size_t>{rows, cols})) {}

SpatialDataset DgpContext::generate(double z_variance, std::uint64_t seed,
                                    std::optional<int> force_mixture) const {
  require(z_variance > 0.0, "Z-field variance must be positive");
  if (force_mixture) require(*force_mixture == 0 || *force_mixture == 1, "forced mixture must be 0 or 1");
  const std::size_t n = rows_ * cols_;

  Rng mix_rng(derive_seed(seed, static_cast<std::uint64_t>(DgpStream::Mixture)));
  Rng t_rng(derive_seed(seed, static_cast<std::uint64_t>(DgpStream::T)));
  Rng z_rng(derive_seed(seed, static_cast<std::uint64_t>(DgpStream::Z)));
  Rng e_rng(derive_seed(seed, static_cast<std::uint64_t>(DgpStream::Noise)));

  std::vector<int> mix(n);
  for (auto& m : mix) m = mix_rng.uniform() < 0.5 ? 1 : 0;
  if (force_mixture) mix.assign(n, *force_mixture);
  const auto t = sampler_.sample(0.0, kTVariance, t_rng);
  const auto z = sampler_.sample(0.0, z_variance, z_rng);
  const auto eps = sampler_.sample(0.0, kNoiseVariance, e_rng);

  std::vector<double> x(n);
  std::vector<double> y(n);
  for (std::size_t s = 0; s < n; ++s) {
    x[s] = mix[s] == 1 ? u_[s] * t[s] : 6.0 + u_[s] * z[s];
    y[s] = x[s] * x[s] + eps[s];
  }
  return SpatialDataset(sites_, 1, std::move(x), std::move(y));
}

SpatialDataset gen_dataset(const DgpParams& p) {
  require(p.a > 0.0, "dependence radius a must be positive");
  require(p.z_variance > 0.0, "Z-field variance must be positive");
  DgpContext ctx(p.rows, p.cols, p.a);
  return ctx.generate(p.z_variance, p.seed, p.force_mixture);
}

}  // namespace spknn
