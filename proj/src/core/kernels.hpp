#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace spknn {

// Catalog order is also the CV tie-break order.
enum class Kernel { Biweight, Epanechnikov, Gaussian, Indicator, Parzen, Triangular };

inline constexpr std::array<Kernel, 6> kAllKernels = {Kernel::Biweight,  Kernel::Epanechnikov,
                                                      Kernel::Gaussian,  Kernel::Indicator,
                                                      Kernel::Parzen,    Kernel::Triangular};

std::string_view kernel_name(Kernel k);
std::optional<Kernel> kernel_from_name(std::string_view name);

inline constexpr bool has_compact_support(Kernel k) { return k != Kernel::Gaussian; }

// Closed support: compact kernels are evaluated on |u| <= 1.
double eval_scalar(Kernel k, double u);

// Radial extension to R^d: eval_scalar(k, ||v||).
double eval_radial(Kernel k, std::span<const double> v);

}  // namespace spknn
