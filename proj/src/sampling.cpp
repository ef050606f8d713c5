#include "kspnet/sampling.hpp"
#include "kspnet/error.hpp"

#include <algorithm>
#include <string>

namespace kspnet {

Index CartesianMask::kept() const { return Index(std::count(keep.begin(), keep.end(), true)); }

CartesianMask make_mask(Index height, Index factor, Index acs_lines)
{
  if (factor < 1 || factor > height) {
    throw Error(
      ErrorKind::Parameter,
      "undersampling factor " + std::to_string(factor) + " outside [1, " + std::to_string(height) + "]");
  }
  if (acs_lines < 0 || acs_lines > height) {
    throw Error(ErrorKind::Parameter, "ACS line count " + std::to_string(acs_lines) + " outside [0, height]");
  }
  CartesianMask m{height, factor, acs_lines, std::vector<bool>(size_t(height), false)};
  for (Index y = 0; y < height; y++) {
    m.keep[size_t(y)] = (y % factor == 0) || (y >= m.acs_begin() && y < m.acs_end());
  }
  return m;
}

ComplexTensor apply_mask(ComplexTensor const &k, CartesianMask const &mask)
{
  if (k.domain() != Domain::KSpace) {
    throw Error(ErrorKind::Domain, "apply_mask expects k-space data");
  }
  if (mask.height != k.height() || Index(mask.keep.size()) != k.height()) {
    throw Error(
      ErrorKind::Shape,
      "mask height " + std::to_string(mask.height) + " does not match tensor height " + std::to_string(k.height()));
  }
  ComplexTensor out = k;
  Index const w = k.width();
  for (Index a = 0; a < k.n_avg(); a++) {
    for (Index c = 0; c < k.n_coil(); c++) {
      auto p = out.plane(a, c);
      for (Index y = 0; y < k.height(); y++) {
        if (!mask.keep[size_t(y)]) {
          std::fill_n(p.begin() + y * w, w, Cx{});
        }
      }
    }
  }
  return out;
}

std::vector<Index> AugmentFactors(Index r_max)
{
  if (r_max < 1) {
    throw Error(ErrorKind::Parameter, "maximum undersampling factor must be >= 1");
  }
  std::vector<Index> f;
  for (Index r = 1; r <= r_max; r *= 2) {
    f.push_back(r);
  }
  return f;
}

Index DrawFactor(Index r_max, Rng &rng)
{
  auto const factors = AugmentFactors(r_max);
  std::uniform_int_distribution<size_t> pick(0, factors.size() - 1);
  return factors[pick(rng)];
}

Undersampled undersample_augment(ComplexTensor const &k, Index r_max, Index acs_lines, Rng &rng)
{
  Index const r = DrawFactor(r_max, rng);
  auto mask = make_mask(k.height(), std::min(r, k.height()), acs_lines);
  return {apply_mask(k, mask), std::move(mask)};
}

Undersampled undersample_augment(ComplexTensor const &k, Index r_max, Index acs_lines, std::uint64_t seed)
{
  Rng rng(seed);
  return undersample_augment(k, r_max, acs_lines, rng);
}

} // namespace kspnet
