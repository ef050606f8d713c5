#include "kspnet/ctensor.hpp"
#include "kspnet/error.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace kspnet {

int ExitCode(ErrorKind kind)
{
  switch (kind) {
  case ErrorKind::Config:
  case ErrorKind::Parameter:
  case ErrorKind::Calibration:
    return 2;
  case ErrorKind::Data:
  case ErrorKind::Shape:
  case ErrorKind::Domain:
    return 3;
  case ErrorKind::Numeric:
  case ErrorKind::Metric:
    return 4;
  }
  return 1;
}

char const *ToString(Domain d) { return d == Domain::KSpace ? "k-space" : "image"; }

namespace {
void CheckDims(Dims4 const &d)
{
  if (d.avg < 1 || d.coil < 1) {
    throw Error(ErrorKind::Shape, "tensor needs at least one average and one coil");
  }
  if (d.height < 2 || d.width < 2) {
    throw Error(
      ErrorKind::Shape,
      "tensor planes must be at least 2x2, got " + std::to_string(d.height) + "x" + std::to_string(d.width));
  }
}
} // namespace

ComplexTensor::ComplexTensor(Dims4 dims, Domain domain)
  : dims_(dims)
  , domain_(domain)
{
  CheckDims(dims_);
  data_.assign(size_t(dims_.size()), Cx{});
}

ComplexTensor::ComplexTensor(Dims4 dims, Domain domain, std::vector<Cx> data)
  : dims_(dims)
  , domain_(domain)
  , data_(std::move(data))
{
  CheckDims(dims_);
  if (Index(data_.size()) != dims_.size()) {
    throw Error(
      ErrorKind::Shape,
      "tensor data holds " + std::to_string(data_.size()) + " samples, dims need " + std::to_string(dims_.size()));
  }
}

double ComplexTensor::energy() const
{
  double e = 0.0;
  for (auto const &z : data_) {
    e += std::norm(z);
  }
  return e;
}

RealPlane::RealPlane(Index height, Index width, double fill)
  : height_(height)
  , width_(width)
  , data_(size_t(height * width), fill)
{
}

ComplexTensor sum_averages(ComplexTensor const &x)
{
  Dims4 d = x.dims();
  d.avg = 1;
  ComplexTensor out(d, x.domain());
  for (Index c = 0; c < d.coil; c++) {
    auto dst = out.plane(0, c);
    for (Index a = 0; a < x.n_avg(); a++) {
      auto src = x.plane(a, c);
      for (size_t i = 0; i < dst.size(); i++) {
        dst[i] += src[i];
      }
    }
  }
  return out;
}

double Phase(Cx z)
{
  if (z.real() == 0.0 && z.imag() == 0.0) {
    return 0.0;
  }
  double const p = std::atan2(z.imag(), z.real());
  return p == -std::numbers::pi ? std::numbers::pi : p;
}

namespace {
void CheckCoil(ComplexTensor const &t, Index coil)
{
  if (coil < 0 || coil >= t.n_coil()) {
    throw Error(
      ErrorKind::Parameter,
      "coil index " + std::to_string(coil) + " out of range [0, " + std::to_string(t.n_coil()) + ")");
  }
}

void CheckDomain(ComplexTensor const &t, Domain want, char const *op)
{
  if (t.domain() != want) {
    throw Error(
      ErrorKind::Domain, std::string(op) + " expects " + ToString(want) + " data, got " + ToString(t.domain()));
  }
}
} // namespace

std::pair<RealPlane, RealPlane> split_image_channels(ComplexTensor const &img, Index coil)
{
  CheckDomain(img, Domain::Image, "split_image_channels");
  CheckCoil(img, coil);
  RealPlane mag(img.height(), img.width()), phs(img.height(), img.width());
  auto src = img.plane(0, coil);
  for (size_t i = 0; i < src.size(); i++) {
    mag.data()[i] = std::abs(src[i]);
    phs.data()[i] = Phase(src[i]);
  }
  return {std::move(mag), std::move(phs)};
}

std::pair<RealPlane, RealPlane> split_kspace_channels(ComplexTensor const &k, Index coil)
{
  CheckDomain(k, Domain::KSpace, "split_kspace_channels");
  CheckCoil(k, coil);
  RealPlane re(k.height(), k.width()), im(k.height(), k.width());
  auto src = k.plane(0, coil);
  for (size_t i = 0; i < src.size(); i++) {
    re.data()[i] = src[i].real();
    im.data()[i] = src[i].imag();
  }
  return {std::move(re), std::move(im)};
}

namespace {
void CheckSameShape(RealPlane const &a, RealPlane const &b)
{
  if (a.height() != b.height() || a.width() != b.width()) {
    throw Error(ErrorKind::Shape, "planes differ in shape");
  }
}
} // namespace

ComplexTensor combine_polar(RealPlane const &magnitude, RealPlane const &phase)
{
  CheckSameShape(magnitude, phase);
  ComplexTensor out({1, 1, magnitude.height(), magnitude.width()}, Domain::Image);
  auto dst = out.plane(0, 0);
  for (size_t i = 0; i < dst.size(); i++) {
    dst[i] = std::polar(magnitude.data()[i], phase.data()[i]);
  }
  return out;
}

ComplexTensor combine_cartesian(RealPlane const &re, RealPlane const &im)
{
  CheckSameShape(re, im);
  ComplexTensor out({1, 1, re.height(), re.width()}, Domain::KSpace);
  auto dst = out.plane(0, 0);
  for (size_t i = 0; i < dst.size(); i++) {
    dst[i] = Cx(re.data()[i], im.data()[i]);
  }
  return out;
}

} // namespace kspnet
