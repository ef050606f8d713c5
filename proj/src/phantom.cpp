#include "kspnet/phantom.hpp"
#include "kspnet/error.hpp"
#include "kspnet/random.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

namespace kspnet {

namespace {
enum Stream : std::uint64_t
{
  kLabelStream = 0,
  kGeometryStream = 1,
  kLesionStream = 2,
  kNoiseStream = 3
};

double Uniform(Rng &rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

struct Ellipse
{
  double cx, cy, a, b, angle, value;

  bool contains(double u, double v) const
  {
    double const c = std::cos(angle), s = std::sin(angle);
    double const du = u - cx, dv = v - cy;
    double const p = (c * du + s * dv) / a, q = (-s * du + c * dv) / b;
    return p * p + q * q <= 1.0;
  }
};

// Normalized coordinate of pixel i in [-1, 1).
double Coord(Index i, Index n) { return (double(i) - double(n / 2)) / (double(n) / 2.0); }
} // namespace

void PhantomSpec::validate() const
{
  if (matrix < 32) {
    throw Error(ErrorKind::Parameter, "phantom matrix must be at least 32");
  }
  if (n_coil < 1 || n_avg < 1) {
    throw Error(ErrorKind::Parameter, "phantom needs at least one coil and one average");
  }
  if (!(lesion_prob >= 0.0 && lesion_prob <= 1.0)) {
    throw Error(ErrorKind::Parameter, "lesion probability must lie in [0, 1]");
  }
  if (noise_sigma < 0.0 || lesion_radius_min <= 0.0 || lesion_radius_max < lesion_radius_min ||
      lesion_contrast_max < lesion_contrast_min || lesion_phase_max < lesion_phase_min) {
    throw Error(ErrorKind::Parameter, "invalid phantom noise or lesion ranges");
  }
}

int SampleLabel(PhantomSpec const &spec, Index index)
{
  Rng rng = MakeRng({spec.seed, std::uint64_t(index), kLabelStream});
  return Uniform(rng, 0.0, 1.0) < spec.lesion_prob ? 1 : 0;
}

PhantomObject make_object(PhantomSpec const &spec, Index index)
{
  spec.validate();
  Index const n = spec.matrix;
  Rng geo = MakeRng({spec.seed, std::uint64_t(index), kGeometryStream});

  Ellipse const body{
    Uniform(geo, -0.05, 0.05),
    Uniform(geo, -0.05, 0.05),
    Uniform(geo, 0.65, 0.8),
    Uniform(geo, 0.5, 0.7),
    Uniform(geo, -0.3, 0.3),
    1.0};
  std::vector<Ellipse> interior;
  int const n_interior = std::uniform_int_distribution<int>(2, 4)(geo);
  for (int i = 0; i < n_interior; i++) {
    double const r = Uniform(geo, 0.0, 0.5), t = Uniform(geo, 0.0, 2.0 * std::numbers::pi);
    interior.push_back(
      {body.cx + r * body.a * std::cos(t),
       body.cy + r * body.b * std::sin(t),
       Uniform(geo, 0.1, 0.3) * body.a,
       Uniform(geo, 0.1, 0.3) * body.b,
       Uniform(geo, 0.0, std::numbers::pi),
       Uniform(geo, -0.3, 0.5)});
  }
  // Smooth background phase: quadratic polynomial in the normalized coordinates.
  double const ps = spec.phase_strength;
  double const p0 = Uniform(geo, -std::numbers::pi, std::numbers::pi);
  double const pu = Uniform(geo, -ps, ps), pv = Uniform(geo, -ps, ps);
  double const puu = Uniform(geo, -ps, ps) / 2, puv = Uniform(geo, -ps, ps) / 2, pvv = Uniform(geo, -ps, ps) / 2;

  PhantomObject obj{ComplexTensor({1, 1, n, n}, Domain::Image), RealPlane(n, n), SampleLabel(spec, index)};

  Ellipse lesion{0, 0, 0, 0, 0, 0};
  double lesion_phase = 0.0;
  if (obj.label == 1) {
    Rng les = MakeRng({spec.seed, std::uint64_t(index), kLesionStream});
    double const r = std::sqrt(Uniform(les, 0.0, 1.0)) * 0.6, t = Uniform(les, 0.0, 2.0 * std::numbers::pi);
    double const radius = 2.0 * Uniform(les, spec.lesion_radius_min, spec.lesion_radius_max);
    lesion = {
      body.cx + r * body.a * std::cos(t),
      body.cy + r * body.b * std::sin(t),
      radius,
      radius,
      0.0,
      Uniform(les, spec.lesion_contrast_min, spec.lesion_contrast_max)};
    lesion_phase = Uniform(les, spec.lesion_phase_min, spec.lesion_phase_max);
  }

  for (Index y = 0; y < n; y++) {
    double const v = Coord(y, n);
    for (Index x = 0; x < n; x++) {
      double const u = Coord(x, n);
      if (!body.contains(u, v)) {
        continue;
      }
      double mag = body.value;
      for (auto const &e : interior) {
        if (e.contains(u, v)) {
          mag += e.value;
        }
      }
      double phase = p0 + pu * u + pv * v + puu * u * u + puv * u * v + pvv * v * v;
      if (obj.label == 1 && lesion.contains(u, v)) {
        mag *= 1.0 + lesion.value;
        phase += lesion_phase;
      }
      obj.image(0, 0, y, x) = std::polar(mag, phase);
      obj.support(y, x) = 1.0;
    }
  }
  return obj;
}

ComplexTensor make_sensitivities(Index n, Index n_coil)
{
  ComplexTensor smaps({1, n_coil, n, n}, Domain::Image);
  double const ring = 1.2, width = 0.7, ramp = 0.5 * std::numbers::pi;
  for (Index c = 0; c < n_coil; c++) {
    double const theta = 2.0 * std::numbers::pi * double(c) / double(n_coil);
    double const cu = ring * std::cos(theta), cv = ring * std::sin(theta);
    double const offset = 2.0 * std::numbers::pi * double(c) / double(n_coil);
    for (Index y = 0; y < n; y++) {
      double const v = Coord(y, n);
      for (Index x = 0; x < n; x++) {
        double const u = Coord(x, n);
        double const d2 = (u - cu) * (u - cu) + (v - cv) * (v - cv);
        double const amp = std::exp(-d2 / (2.0 * width * width));
        double const phase = offset + ramp * (u * std::cos(theta) + v * std::sin(theta));
        smaps(0, c, y, x) = std::polar(amp, phase);
      }
    }
  }
  for (Index y = 0; y < n; y++) {
    for (Index x = 0; x < n; x++) {
      double norm = 0.0;
      for (Index c = 0; c < n_coil; c++) {
        norm += std::norm(smaps(0, c, y, x));
      }
      double const scale = 1.0 / std::sqrt(norm);
      for (Index c = 0; c < n_coil; c++) {
        smaps(0, c, y, x) *= scale;
      }
    }
  }
  return smaps;
}

LabeledSample make_sample(PhantomSpec const &spec, Index index)
{
  auto obj = make_object(spec, index);
  Index const n = spec.matrix, nc = spec.n_coil;
  auto smaps = make_sensitivities(n, nc);

  ComplexTensor coil_images({1, nc, n, n}, Domain::Image);
  for (Index c = 0; c < nc; c++) {
    auto dst = coil_images.plane(0, c);
    auto s = smaps.plane(0, c);
    auto m = obj.image.plane(0, 0);
    for (size_t i = 0; i < dst.size(); i++) {
      dst[i] = s[i] * m[i];
    }
  }
  ComplexTensor const clean = fft2_centered(coil_images);

  ComplexTensor kspace({spec.n_avg, nc, n, n}, Domain::KSpace);
  Rng noise = MakeRng({spec.seed, std::uint64_t(index), kNoiseStream});
  std::normal_distribution<double> gauss(0.0, spec.noise_sigma / std::sqrt(2.0));
  for (Index a = 0; a < spec.n_avg; a++) {
    for (Index c = 0; c < nc; c++) {
      auto dst = kspace.plane(a, c);
      auto src = clean.plane(0, c);
      for (size_t i = 0; i < dst.size(); i++) {
        dst[i] = src[i];
        if (spec.noise_sigma > 0.0) {
          double const re = gauss(noise);
          double const im = gauss(noise);
          dst[i] += Cx(re, im);
        }
      }
    }
  }

  RealPlane truth(n, n);
  auto m = obj.image.plane(0, 0);
  for (size_t i = 0; i < m.size(); i++) {
    truth.data()[i] = double(spec.n_avg) * std::abs(m[i]);
  }
  return {std::move(kspace), obj.label, std::move(truth), std::move(smaps)};
}

double snr_scaled_noise(PhantomSpec const &spec, Index factor)
{
  if (factor < 1) {
    throw Error(ErrorKind::Parameter, "undersampling factor must be >= 1");
  }
  return spec.snr_scaling ? spec.noise_sigma * std::sqrt(double(factor)) : spec.noise_sigma;
}

char const *ToString(Split s)
{
  switch (s) {
  case Split::Train:
    return "train";
  case Split::Val:
    return "val";
  case Split::Test:
    return "test";
  }
  return "?";
}

Split ParseSplit(std::string const &s)
{
  if (s == "train") {
    return Split::Train;
  }
  if (s == "val") {
    return Split::Val;
  }
  if (s == "test") {
    return Split::Test;
  }
  throw Error(ErrorKind::Data, "unknown split '" + s + "'");
}

std::vector<Index> DatasetManifest::ids(Split s) const
{
  std::vector<Index> out;
  for (auto const &e : samples) {
    if (e.split == s) {
      out.push_back(e.id);
    }
  }
  return out;
}

DatasetManifest make_dataset(PhantomSpec const &spec, Index n, SplitFractions fractions)
{
  spec.validate();
  if (n < 20) {
    throw Error(ErrorKind::Parameter, "datasets need at least 20 samples, got " + std::to_string(n));
  }
  if (fractions.train < 0 || fractions.val < 0 || fractions.test < 0 ||
      std::abs(fractions.train + fractions.val + fractions.test - 1.0) > 1e-9) {
    throw Error(ErrorKind::Parameter, "split fractions must be non-negative and sum to 1");
  }
  Index const n_train = Index(std::llround(double(n) * fractions.train));
  Index const n_val = std::min(n - n_train, Index(std::llround(double(n) * fractions.val)));
  DatasetManifest manifest{1, spec, {}};
  manifest.samples.reserve(size_t(n));
  for (Index i = 0; i < n; i++) {
    Split const split = i < n_train ? Split::Train : (i < n_train + n_val ? Split::Val : Split::Test);
    char name[32];
    std::snprintf(name, sizeof name, "samples/%06ld.ksp", long(i));
    manifest.samples.push_back({i, SampleLabel(spec, i), split, name});
  }
  return manifest;
}

} // namespace kspnet
