#pragma once

#include "ctensor.hpp"
#include "sampling.hpp"

#include <vector>

namespace kspnet {

/// Kernel footprint: `ky` acquired rows (spaced R apart) around the target times
/// `kx` adjacent columns.
struct GrappaTaps
{
  Index ky = 4;
  Index kx = 5;
};

/// Interpolation weights indexed [offset-1][target coil][source coil][ky tap][kx tap],
/// where offset m in 1..R-1 is the distance of the missing row below the nearest
/// acquired row above it.
struct GrappaKernel
{
  Index factor = 1;
  Index n_coil = 0;
  GrappaTaps taps;
  std::vector<double> lambda; // absolute Tikhonov weight used per offset
  std::vector<Cx> weights;

  Index size() const { return (factor - 1) * n_coil * n_coil * taps.ky * taps.kx; }
  Cx weight(Index offset, Index target, Index source, Index ty, Index tx) const
  {
    return weights[size_t(((((offset - 1) * n_coil + target) * n_coil + source) * taps.ky + ty) * taps.kx + tx)];
  }

  // Row and column displacements of tap (ty, tx) relative to the target for a given offset.
  Index row_shift(Index offset, Index ty) const { return -offset + factor * (ty - (taps.ky - 1) / 2); }
  Index col_shift(Index tx) const { return tx - (taps.kx - 1) / 2; }
};

/// Smallest ACS block that calibrate() accepts: at least ky*R lines and enough
/// lines to slide the footprint 8 times along ky.
Index MinimumAcsLines(Index factor, GrappaTaps taps = {});

/// Fits one kernel per missing-row offset from a fully sampled calibration block
/// by Tikhonov-regularized least squares, lambda = lambda_rel * trace(A^H A) / cols(A).
GrappaKernel calibrate(ComplexTensor const &acs, Index factor, GrappaTaps taps = {}, double lambda_rel = 1e-4);

/// Fills every row the mask drops; rows the mask keeps (comb and ACS) are copied
/// unchanged. Neighbors outside the matrix count as zero.
ComplexTensor reconstruct(ComplexTensor const &k_us, GrappaKernel const &kernel, CartesianMask const &mask);

/// The ACS rows of `k` as their own tensor.
ComplexTensor ExtractAcs(ComplexTensor const &k, CartesianMask const &mask);

} // namespace kspnet
