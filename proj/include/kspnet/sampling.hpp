#pragma once

#include "ctensor.hpp"
#include "random.hpp"

#include <vector>

namespace kspnet {

/// Cartesian phase-encode pattern: every R-th row starting at row 0, plus a
/// contiguous fully sampled block of `acs_lines` rows centered on the matrix.
struct CartesianMask
{
  Index height = 0;
  Index factor = 1;
  Index acs_lines = 0;
  std::vector<bool> keep;

  Index acs_begin() const { return (height - acs_lines + 1) / 2; }
  Index acs_end() const { return acs_begin() + acs_lines; }
  Index kept() const;
  bool operator==(CartesianMask const &) const = default;
};

CartesianMask make_mask(Index height, Index factor, Index acs_lines);

/// Zeroes every row the mask drops, across all averages, coils and columns.
ComplexTensor apply_mask(ComplexTensor const &k, CartesianMask const &mask);

/// Powers of two up to and including r_max: {1, 2, 4, ...}.
std::vector<Index> AugmentFactors(Index r_max);

struct Undersampled
{
  ComplexTensor kspace;
  CartesianMask mask;
};

/// Draws R uniformly from AugmentFactors(r_max) and undersamples `k` with it.
Undersampled undersample_augment(ComplexTensor const &k, Index r_max, Index acs_lines, Rng &rng);
Undersampled undersample_augment(ComplexTensor const &k, Index r_max, Index acs_lines, std::uint64_t seed);

/// Only the factor draw of undersample_augment.
Index DrawFactor(Index r_max, Rng &rng);

} // namespace kspnet
