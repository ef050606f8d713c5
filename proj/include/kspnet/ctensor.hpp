#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace kspnet {

using Index = std::ptrdiff_t;
using Cx = std::complex<double>;

enum class Domain : std::uint8_t
{
  KSpace = 0,
  Image = 1
};

char const *ToString(Domain d);

struct Dims4
{
  Index avg = 1;
  Index coil = 1;
  Index height = 2;
  Index width = 2;

  Index size() const { return avg * coil * height * width; }
  Index plane_size() const { return height * width; }
  bool operator==(Dims4 const &) const = default;
};

/// Complex samples laid out row-major as [average][coil][height][width].
///
/// The domain tag records whether the planes hold k-space or image data. Only
/// the centered transforms change it; every other operation preserves it.
class ComplexTensor
{
public:
  ComplexTensor(Dims4 dims, Domain domain);
  ComplexTensor(Dims4 dims, Domain domain, std::vector<Cx> data);

  Dims4 const &dims() const { return dims_; }
  Domain domain() const { return domain_; }
  Index n_avg() const { return dims_.avg; }
  Index n_coil() const { return dims_.coil; }
  Index height() const { return dims_.height; }
  Index width() const { return dims_.width; }

  Cx &operator()(Index a, Index c, Index y, Index x) { return data_[offset(a, c) + y * dims_.width + x]; }
  Cx operator()(Index a, Index c, Index y, Index x) const { return data_[offset(a, c) + y * dims_.width + x]; }

  std::span<Cx> plane(Index a, Index c) { return {data_.data() + offset(a, c), size_t(dims_.plane_size())}; }
  std::span<Cx const> plane(Index a, Index c) const
  {
    return {data_.data() + offset(a, c), size_t(dims_.plane_size())};
  }

  std::span<Cx> data() { return data_; }
  std::span<Cx const> data() const { return data_; }

  /// Sum of squared magnitudes over all samples.
  double energy() const;

  bool operator==(ComplexTensor const &) const = default;

private:
  friend ComplexTensor fft2_centered(ComplexTensor const &);
  friend ComplexTensor ifft2_centered(ComplexTensor const &);

  Index offset(Index a, Index c) const { return (a * dims_.coil + c) * dims_.plane_size(); }

  Dims4 dims_;
  Domain domain_;
  std::vector<Cx> data_;
};

/// Real-valued 2-D plane, row-major.
class RealPlane
{
public:
  RealPlane() = default;
  RealPlane(Index height, Index width, double fill = 0.0);

  Index height() const { return height_; }
  Index width() const { return width_; }
  Index size() const { return height_ * width_; }

  double &operator()(Index y, Index x) { return data_[y * width_ + x]; }
  double operator()(Index y, Index x) const { return data_[y * width_ + x]; }

  std::span<double> data() { return data_; }
  std::span<double const> data() const { return data_; }

  bool operator==(RealPlane const &) const = default;

private:
  Index height_ = 0;
  Index width_ = 0;
  std::vector<double> data_;
};

// Centered, unitary 2-D DFTs applied to every (average, coil) plane. DC sits at
// (height/2, width/2) in both domains.
ComplexTensor ifft2_centered(ComplexTensor const &k);
ComplexTensor fft2_centered(ComplexTensor const &img);

// Plane-level versions; `inverse` selects the k-space to image direction.
void fft2_centered_plane(std::span<Cx> plane, Index height, Index width, bool inverse);

ComplexTensor sum_averages(ComplexTensor const &x);

/// Magnitude and phase of one coil of an image-domain tensor (average 0).
/// Phase lies in [-pi, pi] with arg(0) = 0.
std::pair<RealPlane, RealPlane> split_image_channels(ComplexTensor const &img, Index coil);

/// Real and imaginary parts of one coil of a k-space tensor (average 0).
std::pair<RealPlane, RealPlane> split_kspace_channels(ComplexTensor const &k, Index coil);

// Inverses of the splits, producing a single plane tensor in the matching domain.
ComplexTensor combine_polar(RealPlane const &magnitude, RealPlane const &phase);
ComplexTensor combine_cartesian(RealPlane const &re, RealPlane const &im);

/// arg(z) with the conventions arg(0) = 0 and arg(-1) = +pi.
double Phase(Cx z);

} // namespace kspnet
