#include "kspnet/grappa.hpp"
#include "kspnet/error.hpp"
#include "kspnet/instrument.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

namespace kspnet {

namespace instrument {
std::atomic<std::uint64_t> &LeastSquaresSolves()
{
  static std::atomic<std::uint64_t> count{0};
  return count;
}
} // namespace instrument

Index MinimumAcsLines(Index factor, GrappaTaps taps)
{
  if (factor <= 1) {
    return 0;
  }
  return std::max(factor * taps.ky, factor * (taps.ky - 1) + 8);
}

GrappaKernel calibrate(ComplexTensor const &acs, Index factor, GrappaTaps taps, double lambda_rel)
{
  if (acs.domain() != Domain::KSpace) {
    throw Error(ErrorKind::Domain, "GRAPPA calibration expects k-space data");
  }
  if (acs.n_avg() != 1) {
    throw Error(ErrorKind::Shape, "GRAPPA calibration expects a single average");
  }
  if (factor < 1 || taps.ky < 1 || taps.kx < 1 || lambda_rel < 0.0) {
    throw Error(ErrorKind::Parameter, "invalid GRAPPA factor, footprint or regularization");
  }
  Index const nc = acs.n_coil();
  GrappaKernel kernel{factor, nc, taps, {}, {}};
  if (factor == 1) {
    return kernel;
  }
  Index const min_lines = MinimumAcsLines(factor, taps);
  if (acs.height() < min_lines) {
    throw Error(
      ErrorKind::Calibration,
      "ACS block of " + std::to_string(acs.height()) + " lines is too small for R=" + std::to_string(factor) +
        " with " + std::to_string(taps.ky) + " ky taps; need at least " + std::to_string(min_lines));
  }
  if (acs.width() < taps.kx) {
    throw Error(ErrorKind::Calibration, "ACS block narrower than the kx footprint");
  }

  Index const h = acs.height(), w = acs.width();
  Index const cols = nc * taps.ky * taps.kx;
  Index const x_lo = (taps.kx - 1) / 2, x_hi = w - 1 - taps.kx / 2;
  Index const nx = x_hi - x_lo + 1;
  kernel.weights.assign(size_t(kernel.size()), Cx{});
  kernel.lambda.assign(size_t(factor - 1), 0.0);

  for (Index m = 1; m < factor; m++) {
    Index const y_lo = -kernel.row_shift(m, 0);
    Index const y_hi = h - 1 - kernel.row_shift(m, taps.ky - 1);
    Index const ny = y_hi - y_lo + 1;
    Index const rows = ny * nx;

    Eigen::MatrixXcd A(rows + cols, cols);
    Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(rows + cols, nc);
    for (Index yi = 0; yi < ny; yi++) {
      Index const y = y_lo + yi;
      for (Index xi = 0; xi < nx; xi++) {
        Index const x = x_lo + xi;
        Index const r = yi * nx + xi;
        Index col = 0;
        for (Index s = 0; s < nc; s++) {
          for (Index ty = 0; ty < taps.ky; ty++) {
            Index const sy = y + kernel.row_shift(m, ty);
            for (Index tx = 0; tx < taps.kx; tx++) {
              A(r, col++) = acs(0, s, sy, x + kernel.col_shift(tx));
            }
          }
        }
        for (Index t = 0; t < nc; t++) {
          B(r, t) = acs(0, t, y, x);
        }
      }
    }
    double const lambda = lambda_rel * A.topRows(rows).squaredNorm() / double(cols);
    A.bottomRows(cols) = Eigen::MatrixXcd::Identity(cols, cols) * std::sqrt(lambda);
    kernel.lambda[size_t(m - 1)] = lambda;

    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(A);
    Eigen::MatrixXcd const W = qr.solve(B);
    if (!W.allFinite()) {
      throw Error(ErrorKind::Numeric, "GRAPPA calibration produced non-finite weights");
    }
    instrument::LeastSquaresSolves() += std::uint64_t(nc);

    for (Index t = 0; t < nc; t++) {
      for (Index c = 0; c < cols; c++) {
        kernel.weights[size_t(((m - 1) * nc + t) * cols + c)] = W(c, t);
      }
    }
  }
  return kernel;
}

ComplexTensor reconstruct(ComplexTensor const &k_us, GrappaKernel const &kernel, CartesianMask const &mask)
{
  if (k_us.domain() != Domain::KSpace) {
    throw Error(ErrorKind::Domain, "GRAPPA reconstruction expects k-space data");
  }
  if (mask.factor != kernel.factor) {
    throw Error(
      ErrorKind::Parameter,
      "mask factor R=" + std::to_string(mask.factor) + " does not match kernel R=" + std::to_string(kernel.factor));
  }
  if (mask.height != k_us.height() || Index(mask.keep.size()) != k_us.height() ||
      (kernel.factor > 1 && kernel.n_coil != k_us.n_coil())) {
    throw Error(ErrorKind::Shape, "GRAPPA kernel, mask and data dimensions disagree");
  }
  ComplexTensor out = k_us;
  if (kernel.factor == 1) {
    return out;
  }

  Index const nc = k_us.n_coil(), h = k_us.height(), w = k_us.width();
  auto const &taps = kernel.taps;
  Index const cols = nc * taps.ky * taps.kx;

  std::vector<Eigen::MatrixXcd> W(size_t(kernel.factor - 1), Eigen::MatrixXcd(cols, nc));
  for (Index m = 1; m < kernel.factor; m++) {
    for (Index t = 0; t < nc; t++) {
      for (Index c = 0; c < cols; c++) {
        W[size_t(m - 1)](c, t) = kernel.weights[size_t(((m - 1) * nc + t) * cols + c)];
      }
    }
  }

  Eigen::MatrixXcd N(w, cols);
  Eigen::MatrixXcd T(w, nc);
  for (Index a = 0; a < k_us.n_avg(); a++) {
    for (Index y = 0; y < h; y++) {
      if (mask.keep[size_t(y)]) {
        continue;
      }
      Index const m = y % kernel.factor;
      N.setZero();
      Index col = 0;
      for (Index s = 0; s < nc; s++) {
        auto const src = k_us.plane(a, s);
        for (Index ty = 0; ty < taps.ky; ty++) {
          Index const sy = y + kernel.row_shift(m, ty);
          for (Index tx = 0; tx < taps.kx; tx++, col++) {
            if (sy < 0 || sy >= h) {
              continue;
            }
            Index const dx = kernel.col_shift(tx);
            for (Index x = std::max<Index>(0, -dx); x < std::min(w, w - dx); x++) {
              N(x, col) = src[size_t(sy * w + x + dx)];
            }
          }
        }
      }
      T.noalias() = N * W[size_t(m - 1)];
      for (Index t = 0; t < nc; t++) {
        auto dst = out.plane(a, t);
        for (Index x = 0; x < w; x++) {
          dst[size_t(y * w + x)] = T(x, t);
        }
      }
    }
  }
  return out;
}

ComplexTensor ExtractAcs(ComplexTensor const &k, CartesianMask const &mask)
{
  if (mask.height != k.height()) {
    throw Error(ErrorKind::Shape, "mask height does not match k-space height");
  }
  if (mask.acs_lines < 2) {
    throw Error(ErrorKind::Calibration, "mask has no ACS block");
  }
  Dims4 d = k.dims();
  d.height = mask.acs_lines;
  ComplexTensor acs(d, k.domain());
  for (Index a = 0; a < d.avg; a++) {
    for (Index c = 0; c < d.coil; c++) {
      auto src = k.plane(a, c);
      auto dst = acs.plane(a, c);
      std::copy_n(src.begin() + mask.acs_begin() * d.width, d.plane_size(), dst.begin());
    }
  }
  return acs;
}

} // namespace kspnet
