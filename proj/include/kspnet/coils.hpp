#pragma once

#include "ctensor.hpp"

#include <Eigen/Core>
#include <vector>

namespace kspnet {

struct CompressionResult
{
  ComplexTensor compressed;                 // n_coil = number of kept components
  std::vector<double> explained_variance;   // S[c]^2 / sum(S^2), non-increasing
  Eigen::MatrixXcd basis;                   // n_coil_in x n_components, orthonormal columns
};

/// Coil compression in k-space by SVD of the (H*W) x n_coil sample matrix, no
/// mean-centering. Each basis column is rotated so its largest-magnitude entry
/// is real and positive, which makes the output independent of the SVD backend.
CompressionResult pca_compress(ComplexTensor const &k, Index n_components = 1);

/// Root-sum-of-squares coil combination of an image-domain tensor.
RealPlane rss_combine(ComplexTensor const &img);

/// Matched-filter combination with known sensitivities:
///   sum_c conj(s_c) z_c / max(sum_c |s_c|^2, eps), and 0 where sum |s|^2 < eps.
ComplexTensor sensitivity_combine(ComplexTensor const &img, ComplexTensor const &smaps);

inline constexpr double kCombineEpsilon = 1e-12;

} // namespace kspnet
