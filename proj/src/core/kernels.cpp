#include "kernels.hpp"

#include <cmath>

namespace spknn {

std::string_view kernel_name(Kernel k) {
  switch (k) {
    case Kernel::Biweight: return "biweight";
    case Kernel::Epanechnikov: return "epanechnikov";
    case Kernel::Gaussian: return "gaussian";
    case Kernel::Indicator: return "indicator";
    case Kernel::Parzen: return "parzen";
    case Kernel::Triangular: return "triangular";
  }
  return "unknown";
}

std::optional<Kernel> kernel_from_name(std::string_view name) {
  for (Kernel k : kAllKernels) {
    if (kernel_name(k) == name) return k;
  }
  return std::nullopt;
}

double eval_scalar(Kernel k, double u) {
  const double a = std::fabs(u);
  if (k == Kernel::Gaussian) return std::exp(-0.5 * u * u);
  if (!(a <= 1.0)) return 0.0;  // also catches NaN from 0/0 upstream
  switch (k) {
    case Kernel::Biweight: {
      const double t = 1.0 - a * a;
      return (15.0 / 16.0) * t * t;
    }
    case Kernel::Epanechnikov: return 0.75 * (1.0 - a * a);
    case Kernel::Indicator: return 1.0;
    case Kernel::Parzen: {
      if (a < 0.5) return 1.0 - 6.0 * a * a + 6.0 * a * a * a;
      const double t = 1.0 - a;
      return 2.0 * t * t * t;
    }
    case Kernel::Triangular: return 1.0 - a;
    case Kernel::Gaussian: break;
  }
  return 0.0;
}

double eval_radial(Kernel k, std::span<const double> v) {
  double acc = 0.0;
  for (double c : v) acc += c * c;
  return eval_scalar(k, std::sqrt(acc));
}

}  // namespace spknn
