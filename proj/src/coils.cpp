#include "kspnet/coils.hpp"
#include "kspnet/error.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <string>

namespace kspnet {

CompressionResult pca_compress(ComplexTensor const &k, Index n_components)
{
  if (k.domain() != Domain::KSpace) {
    throw Error(ErrorKind::Domain, "pca_compress expects k-space data");
  }
  if (k.n_avg() != 1) {
    throw Error(ErrorKind::Shape, "pca_compress expects a single average; call sum_averages first");
  }
  Index const nc = k.n_coil();
  if (n_components < 1 || n_components > nc) {
    throw Error(
      ErrorKind::Parameter,
      "component count " + std::to_string(n_components) + " outside [1, " + std::to_string(nc) + "]");
  }
  Index const np = k.dims().plane_size();
  // Planes are contiguous per coil, so the samples matrix is a column-major view.
  Eigen::Map<Eigen::MatrixXcd const> M(k.data().data(), np, nc);

  // All-zero samples (unacquired k-space) leave V and the singular values
  // unchanged, so the decomposition runs on the acquired samples only.
  std::vector<Index> rows;
  rows.reserve(size_t(np));
  for (Index i = 0; i < np; i++) {
    if (M.row(i).squaredNorm() > 0.0) {
      rows.push_back(i);
    }
  }
  Eigen::MatrixXcd packed(std::max<Index>(Index(rows.size()), 1), nc);
  packed.setZero();
  for (size_t r = 0; r < rows.size(); r++) {
    packed.row(Index(r)) = M.row(rows[r]);
  }
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(packed, Eigen::ComputeThinV);
  Eigen::MatrixXcd V = svd.matrixV();
  Eigen::VectorXd const S = svd.singularValues();

  for (Index c = 0; c < nc; c++) {
    Index best = 0;
    for (Index i = 1; i < nc; i++) {
      if (std::abs(V(i, c)) > std::abs(V(best, c))) {
        best = i;
      }
    }
    double const mag = std::abs(V(best, c));
    if (mag > 0.0) {
      V.col(c) *= std::conj(V(best, c)) / mag;
    }
  }

  double const total = S.squaredNorm();
  std::vector<double> ratio(static_cast<size_t>(n_components));
  for (Index c = 0; c < n_components; c++) {
    ratio[size_t(c)] = total > 0.0 ? S(c) * S(c) / total : (c == 0 ? 1.0 : 0.0);
  }

  Eigen::MatrixXcd basis = V.leftCols(n_components);
  ComplexTensor out({1, n_components, k.height(), k.width()}, Domain::KSpace);
  // Fixed summation order so the projection does not depend on buffer alignment.
  for (Index c = 0; c < n_components; c++) {
    auto dst = out.plane(0, c);
    for (Index i = 0; i < nc; i++) {
      Cx const w = basis(i, c);
      auto src = k.plane(0, i);
      for (Index p = 0; p < np; p++) {
        dst[size_t(p)] += src[size_t(p)] * w;
      }
    }
  }
  return {std::move(out), std::move(ratio), std::move(basis)};
}

RealPlane rss_combine(ComplexTensor const &img)
{
  if (img.domain() != Domain::Image) {
    throw Error(ErrorKind::Domain, "rss_combine expects image data");
  }
  if (img.n_avg() != 1) {
    throw Error(ErrorKind::Shape, "rss_combine expects a single average");
  }
  RealPlane out(img.height(), img.width());
  auto dst = out.data();
  for (Index c = 0; c < img.n_coil(); c++) {
    auto src = img.plane(0, c);
    for (size_t i = 0; i < dst.size(); i++) {
      dst[i] += std::norm(src[i]);
    }
  }
  for (auto &v : dst) {
    v = std::sqrt(v);
  }
  return out;
}

ComplexTensor sensitivity_combine(ComplexTensor const &img, ComplexTensor const &smaps)
{
  if (img.domain() != Domain::Image) {
    throw Error(ErrorKind::Domain, "sensitivity_combine expects image data");
  }
  if (img.n_avg() != 1 || smaps.n_avg() != 1 || img.n_coil() != smaps.n_coil() || img.height() != smaps.height() ||
      img.width() != smaps.width()) {
    throw Error(ErrorKind::Shape, "sensitivity maps do not match the coil images");
  }
  ComplexTensor out({1, 1, img.height(), img.width()}, Domain::Image);
  auto dst = out.plane(0, 0);
  std::vector<double> norm(dst.size(), 0.0);
  for (Index c = 0; c < img.n_coil(); c++) {
    auto z = img.plane(0, c);
    auto s = smaps.plane(0, c);
    for (size_t i = 0; i < dst.size(); i++) {
      dst[i] += std::conj(s[i]) * z[i];
      norm[i] += std::norm(s[i]);
    }
  }
  for (size_t i = 0; i < dst.size(); i++) {
    dst[i] = norm[i] < kCombineEpsilon ? Cx{} : dst[i] / std::max(norm[i], kCombineEpsilon);
  }
  return out;
}

} // namespace kspnet
