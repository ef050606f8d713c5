#pragma once

#include "ctensor.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace kspnet {

/// Synthetic multi-coil acquisition. Lengths (radii) are fractions of the
/// field of view so the same spec works at any matrix size.
struct PhantomSpec
{
  Index matrix = 100;
  Index n_coil = 16;
  Index n_avg = 4;
  double noise_sigma = 0.05; // complex Gaussian std per k-space sample and average
  double lesion_prob = 1.0 / 18.0;
  double lesion_radius_min = 0.03;
  double lesion_radius_max = 0.06;
  double lesion_contrast_min = 0.3; // relative magnitude increase over local background
  double lesion_contrast_max = 0.6;
  double lesion_phase_min = 0.0; // extra phase inside the lesion, radians
  double lesion_phase_max = 0.0;
  double phase_strength = 3.14159265358979; // scale of the smooth background phase
  bool snr_scaling = false;                 // acquisition-realistic noise growth with R
  std::uint64_t seed = 0;

  void validate() const;
};

struct LabeledSample
{
  ComplexTensor kspace;     // [n_avg, n_coil, matrix, matrix]
  int label = 0;            // 1 iff a lesion was planted
  RealPlane ground_truth;   // magnitude of the noiseless average-summed object
  ComplexTensor smaps;      // [1, n_coil, matrix, matrix], image domain, sum |s|^2 = 1
};

/// Noiseless complex object of a sample before coil weighting.
struct PhantomObject
{
  ComplexTensor image; // [1, 1, matrix, matrix]
  RealPlane support;   // 1 inside the body, 0 outside
  int label = 0;
};

int SampleLabel(PhantomSpec const &spec, Index index);
PhantomObject make_object(PhantomSpec const &spec, Index index);
ComplexTensor make_sensitivities(Index matrix, Index n_coil);
LabeledSample make_sample(PhantomSpec const &spec, Index index);

/// Noise std for undersampling factor R: sigma * sqrt(R) when snr_scaling is on,
/// otherwise sigma.
double snr_scaled_noise(PhantomSpec const &spec, Index factor);

enum class Split
{
  Train,
  Val,
  Test
};
char const *ToString(Split s);
Split ParseSplit(std::string const &s);

struct SplitFractions
{
  double train = 0.7;
  double val = 0.15;
  double test = 0.15;
};

struct SampleEntry
{
  Index id = 0;
  int label = 0;
  Split split = Split::Train;
  std::string path; // relative to the manifest directory
};

struct DatasetManifest
{
  int format_version = 1;
  PhantomSpec spec;
  std::vector<SampleEntry> samples;

  std::vector<Index> ids(Split s) const;
};

/// Contiguous split by index: the first round(n * train) ids are training, the
/// next round(n * val) validation, the rest test.
DatasetManifest make_dataset(PhantomSpec const &spec, Index n, SplitFractions fractions = {});

} // namespace kspnet
