#include "metrics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "error.hpp"

namespace spknn {

double mae(std::span<const double> y, std::span<const double> yhat) {
  if (y.size() != yhat.size()) {
    fail(ErrorCode::InvalidArgument, "mae: length mismatch (" + std::to_string(y.size()) + " vs " +
                                         std::to_string(yhat.size()) + ")");
  }
  require(!y.empty(), "mae: empty input");
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) acc += std::fabs(y[i] - yhat[i]);
  return acc / static_cast<double>(y.size());
}

CcrReport ccr(std::span<const int> truth, std::span<const int> pred, int num_classes) {
  if (truth.size() != pred.size()) fail(ErrorCode::InvalidArgument, "ccr: length mismatch");
  require(!truth.empty(), "ccr: empty input");
  require(num_classes >= 1, "ccr: number of classes must be positive");
  const auto m = static_cast<std::size_t>(num_classes);
  std::vector<std::size_t> counts(m, 0);
  std::vector<std::size_t> hits(m, 0);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    for (int v : {truth[i], pred[i]}) {
      if (v < 1 || v > num_classes) {
        fail(ErrorCode::InvalidData, "ccr: label " + std::to_string(v) + " outside 1.." +
                                         std::to_string(num_classes));
      }
    }
    const auto c = static_cast<std::size_t>(truth[i] - 1);
    ++counts[c];
    if (truth[i] == pred[i]) {
      ++hits[c];
      ++correct;
    }
  }
  CcrReport out;
  out.overall = static_cast<double>(correct) / static_cast<double>(truth.size());
  out.class_counts = counts;
  out.per_class.resize(m);
  for (std::size_t c = 0; c < m; ++c) {
    if (counts[c] > 0) out.per_class[c] = static_cast<double>(hits[c]) / static_cast<double>(counts[c]);
  }
  return out;
}

namespace {

double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  fail(ErrorCode::Numerical, "incomplete beta continued fraction did not converge");
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  require(a > 0.0 && b > 0.0, "incomplete beta: a and b must be positive");
  require(x >= 0.0 && x <= 1.0, "incomplete beta: x must lie in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_sf(double t, double df) {
  require(df > 0.0, "t distribution: degrees of freedom must be positive");
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return t > 0 ? 0.0 : 1.0;
  const double x = df / (df + t * t);
  const double tail = 0.5 * incomplete_beta(0.5 * df, 0.5, x);
  return t > 0.0 ? tail : 1.0 - tail;
}

double student_t_cdf(double t, double df) { return 1.0 - student_t_sf(t, df); }

TTestResult paired_ttest(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(ErrorCode::InvalidArgument, "paired t-test: length mismatch");
  if (a.size() < 2) fail(ErrorCode::InvalidArgument, "paired t-test needs at least 2 pairs");
  const std::size_t n = a.size();
  std::vector<double> d(n);
  bool all_equal = true;
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = a[i] - b[i];
    if (d[i] != d[0]) all_equal = false;
  }
  if (all_equal) fail(ErrorCode::Degenerate, "paired t-test: differences have zero variance");
  const auto s = summarize(d);
  TTestResult out;
  out.df = n - 1;
  out.t = s.mean / (s.sd / std::sqrt(static_cast<double>(n)));
  out.p_value = student_t_sf(out.t, static_cast<double>(out.df));
  return out;
}

EvalReport summarize(std::vector<double> values) {
  EvalReport r;
  r.per_replication = std::move(values);
  const auto& v = r.per_replication;
  if (v.empty()) return r;
  double acc = 0.0;
  for (double x : v) acc += x;
  r.mean = acc / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - r.mean) * (x - r.mean);
    r.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return r;
}

}  // namespace spknn
