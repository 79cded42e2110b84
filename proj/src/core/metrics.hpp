#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace spknn {

double mae(std::span<const double> y, std::span<const double> yhat);

struct CcrReport {
  double overall = 0.0;
  // per_class[j - 1] is the rate among true members of class j; empty when
  // the class has no true members
  std::vector<std::optional<double>> per_class;
  std::vector<std::size_t> class_counts;
};

CcrReport ccr(std::span<const int> truth, std::span<const int> pred, int num_classes);

// Regularized incomplete beta I_x(a, b), continued fraction (modified Lentz).
double incomplete_beta(double a, double b, double x);

// Student t distribution function with df degrees of freedom.
double student_t_cdf(double t, double df);

// Upper tail 1 - F(t; df).
double student_t_sf(double t, double df);

struct TTestResult {
  double t = 0.0;
  // one-sided, alternative mean(a) > mean(b)
  double p_value = 0.0;
  std::size_t df = 0;
};

// Paired t-test on a - b. Throws Degenerate when all differences are equal.
TTestResult paired_ttest(std::span<const double> a, std::span<const double> b);

struct EvalReport {
  std::vector<double> per_replication;
  double mean = 0.0;
  double sd = 0.0;
  std::optional<double> t_stat;
  std::optional<double> p_value;
};

// Mean and sample SD (n - 1 denominator; 0 for a single value).
EvalReport summarize(std::vector<double> values);

}  // namespace spknn
