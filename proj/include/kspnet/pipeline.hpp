#pragma once

#include "ctensor.hpp"
#include "grappa.hpp"
#include "random.hpp"
#include "sampling.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace kspnet {

enum class ChannelTag
{
  MagImage,
  PhaseImage,
  RealK,
  ImagK
};

/// The three input configurations compared: magnitude, magnitude + phase, and
/// magnitude + k-space real/imaginary.
enum class ChannelSet
{
  Mag,
  MagPhase,
  MagK
};

enum class PipelineKind
{
  PCA,
  GRAPPA
};

std::string ToString(ChannelSet c);
std::string ToString(PipelineKind p);
ChannelSet ParseChannelSet(std::string const &s);
PipelineKind ParsePipelineKind(std::string const &s);
std::vector<ChannelTag> Tags(ChannelSet c);
bool IsKSpaceTag(ChannelTag t);

struct StackMeta
{
  Index factor = 1;
  PipelineKind pipeline = PipelineKind::PCA;
  Index sample_id = 0;
};

/// Real-valued input planes for the classifier, ordered Mag, Phase, RealK, ImagK.
struct ChannelStack
{
  std::vector<ChannelTag> tags;
  std::vector<RealPlane> channels;
  int label = 0;
  StackMeta meta;

  Index height() const { return channels.empty() ? 0 : channels.front().height(); }
  Index width() const { return channels.empty() ? 0 : channels.front().width(); }
};

/// apply_mask followed by sum_averages, in one pass.
ComplexTensor masked_average_sum(ComplexTensor const &raw, CartesianMask const &mask);

/// Mask, sum averages and compress to the first principal coil in k-space. No
/// reconstruction is performed; the result is complex single-coil k-space.
ComplexTensor proposed_pipeline(ComplexTensor const &raw, CartesianMask const &mask);

struct GrappaSettings
{
  GrappaTaps taps;
  double lambda_rel = 1e-4;
};

struct StandardResult
{
  RealPlane magnitude;  // coil-combined magnitude image
  ComplexTensor kspace; // GRAPPA-filled k-space compressed to one coil
};

/// Mask, sum averages, GRAPPA (calibrated on the mask's ACS rows), then coil
/// combination in the image domain. With `smaps` the combination uses the known
/// sensitivities, otherwise RSS.
StandardResult standard_pipeline(
  ComplexTensor const &raw,
  CartesianMask const &mask,
  GrappaSettings const &grappa = {},
  ComplexTensor const *smaps = nullptr);

/// Masked, average-summed, GRAPPA-filled multi-coil k-space (the first half of
/// standard_pipeline).
ComplexTensor grappa_fill(ComplexTensor const &raw, CartesianMask const &mask, GrappaSettings const &grappa = {});

ChannelStack stack_channels(ComplexTensor const &kspace_1coil, ChannelSet set, int label = 0, StackMeta meta = {});

/// Per-channel standardization across the whole batch: (x - mean) / max(std, 1e-8).
void normalize_batch(std::span<ChannelStack> batch);
/// Same statistics computed per sample instead of per batch.
void normalize_each(std::span<ChannelStack> batch);

/// Left-right mirror of the image content. k-space channels are recomputed from
/// the mirrored complex image.
ChannelStack hflip(ChannelStack const &stack);
ChannelStack hflip_augment(ChannelStack const &stack, Rng &rng);
/// Mirror of a single-coil k-space tensor through the image domain.
ComplexTensor hflip_kspace(ComplexTensor const &kspace_1coil);

inline constexpr double kNormalizeEpsilon = 1e-8;

} // namespace kspnet
