#include "kspnet/pipeline.hpp"
#include "kspnet/coils.hpp"
#include "kspnet/error.hpp"

#include <algorithm>
#include <cmath>

namespace kspnet {

std::string ToString(ChannelSet c)
{
  switch (c) {
  case ChannelSet::Mag:
    return "mag";
  case ChannelSet::MagPhase:
    return "mag+phase";
  case ChannelSet::MagK:
    return "mag+k";
  }
  return "?";
}

std::string ToString(PipelineKind p) { return p == PipelineKind::PCA ? "pca" : "grappa"; }

ChannelSet ParseChannelSet(std::string const &s)
{
  if (s == "mag") {
    return ChannelSet::Mag;
  }
  if (s == "mag+phase") {
    return ChannelSet::MagPhase;
  }
  if (s == "mag+k") {
    return ChannelSet::MagK;
  }
  throw Error(ErrorKind::Config, "unknown channel set '" + s + "' (expected mag, mag+phase or mag+k)");
}

PipelineKind ParsePipelineKind(std::string const &s)
{
  if (s == "pca") {
    return PipelineKind::PCA;
  }
  if (s == "grappa") {
    return PipelineKind::GRAPPA;
  }
  throw Error(ErrorKind::Config, "unknown pipeline '" + s + "' (expected pca or grappa)");
}

std::vector<ChannelTag> Tags(ChannelSet c)
{
  switch (c) {
  case ChannelSet::Mag:
    return {ChannelTag::MagImage};
  case ChannelSet::MagPhase:
    return {ChannelTag::MagImage, ChannelTag::PhaseImage};
  case ChannelSet::MagK:
    return {ChannelTag::MagImage, ChannelTag::RealK, ChannelTag::ImagK};
  }
  return {};
}

bool IsKSpaceTag(ChannelTag t) { return t == ChannelTag::RealK || t == ChannelTag::ImagK; }

ComplexTensor masked_average_sum(ComplexTensor const &raw, CartesianMask const &mask)
{
  if (raw.domain() != Domain::KSpace) {
    throw Error(ErrorKind::Domain, "masking expects k-space data");
  }
  if (mask.height != raw.height() || Index(mask.keep.size()) != raw.height()) {
    throw Error(ErrorKind::Shape, "mask height does not match tensor height");
  }
  Dims4 d = raw.dims();
  d.avg = 1;
  ComplexTensor out(d, Domain::KSpace);
  Index const w = raw.width();
  for (Index c = 0; c < d.coil; c++) {
    auto dst = out.plane(0, c);
    for (Index a = 0; a < raw.n_avg(); a++) {
      auto src = raw.plane(a, c);
      for (Index y = 0; y < d.height; y++) {
        if (mask.keep[size_t(y)]) {
          for (Index x = y * w; x < (y + 1) * w; x++) {
            dst[size_t(x)] += src[size_t(x)];
          }
        }
      }
    }
  }
  return out;
}

ComplexTensor proposed_pipeline(ComplexTensor const &raw, CartesianMask const &mask)
{
  return pca_compress(masked_average_sum(raw, mask), 1).compressed;
}

ComplexTensor grappa_fill(ComplexTensor const &raw, CartesianMask const &mask, GrappaSettings const &grappa)
{
  ComplexTensor const summed = masked_average_sum(raw, mask);
  if (mask.factor == 1) {
    return summed;
  }
  auto const kernel = calibrate(ExtractAcs(summed, mask), mask.factor, grappa.taps, grappa.lambda_rel);
  return reconstruct(summed, kernel, mask);
}

StandardResult standard_pipeline(
  ComplexTensor const &raw, CartesianMask const &mask, GrappaSettings const &grappa, ComplexTensor const *smaps)
{
  ComplexTensor const filled = grappa_fill(raw, mask, grappa);
  ComplexTensor const coil_images = ifft2_centered(filled);
  RealPlane magnitude;
  if (smaps) {
    auto const combined = sensitivity_combine(coil_images, *smaps);
    magnitude = split_image_channels(combined, 0).first;
  } else {
    magnitude = rss_combine(coil_images);
  }
  return {std::move(magnitude), pca_compress(filled, 1).compressed};
}

ChannelStack stack_channels(ComplexTensor const &k, ChannelSet set, int label, StackMeta meta)
{
  if (k.domain() != Domain::KSpace || k.n_coil() != 1 || k.n_avg() != 1) {
    throw Error(ErrorKind::Shape, "stack_channels expects single-coil, single-average k-space");
  }
  ChannelStack stack{Tags(set), {}, label, meta};
  auto [mag, phase] = split_image_channels(ifft2_centered(k), 0);
  stack.channels.push_back(std::move(mag));
  if (set == ChannelSet::MagPhase) {
    stack.channels.push_back(std::move(phase));
  } else if (set == ChannelSet::MagK) {
    auto [re, im] = split_kspace_channels(k, 0);
    stack.channels.push_back(std::move(re));
    stack.channels.push_back(std::move(im));
  }
  return stack;
}

namespace {
void Standardize(std::span<ChannelStack> batch, size_t channel)
{
  double sum = 0.0;
  Index count = 0;
  for (auto const &s : batch) {
    for (double v : s.channels[channel].data()) {
      sum += v;
    }
    count += s.channels[channel].size();
  }
  double const mean = sum / double(count);
  double ss = 0.0;
  for (auto const &s : batch) {
    for (double v : s.channels[channel].data()) {
      ss += (v - mean) * (v - mean);
    }
  }
  double const scale = 1.0 / std::max(std::sqrt(ss / double(count)), kNormalizeEpsilon);
  for (auto &s : batch) {
    for (double &v : s.channels[channel].data()) {
      v = (v - mean) * scale;
    }
  }
}
} // namespace

void normalize_batch(std::span<ChannelStack> batch)
{
  if (batch.empty()) {
    throw Error(ErrorKind::Parameter, "cannot normalize an empty batch");
  }
  for (auto const &s : batch) {
    if (s.tags != batch.front().tags) {
      throw Error(ErrorKind::Shape, "batch mixes channel configurations");
    }
  }
  for (size_t c = 0; c < batch.front().channels.size(); c++) {
    Standardize(batch, c);
  }
}

void normalize_each(std::span<ChannelStack> batch)
{
  for (size_t i = 0; i < batch.size(); i++) {
    normalize_batch(batch.subspan(i, 1));
  }
}

namespace {
void MirrorRows(std::span<Cx> p, Index h, Index w)
{
  for (Index y = 0; y < h; y++) {
    std::reverse(p.begin() + y * w, p.begin() + (y + 1) * w);
  }
}

RealPlane Mirror(RealPlane const &in)
{
  RealPlane out = in;
  for (Index y = 0; y < in.height(); y++) {
    auto row = out.data().subspan(size_t(y * in.width()), size_t(in.width()));
    std::reverse(row.begin(), row.end());
  }
  return out;
}
} // namespace

ComplexTensor hflip_kspace(ComplexTensor const &k)
{
  ComplexTensor img = ifft2_centered(k);
  for (Index a = 0; a < img.n_avg(); a++) {
    for (Index c = 0; c < img.n_coil(); c++) {
      MirrorRows(img.plane(a, c), img.height(), img.width());
    }
  }
  return fft2_centered(img);
}

ChannelStack hflip(ChannelStack const &stack)
{
  ChannelStack out = stack;
  auto const k_re = std::find(stack.tags.begin(), stack.tags.end(), ChannelTag::RealK);
  auto const k_im = std::find(stack.tags.begin(), stack.tags.end(), ChannelTag::ImagK);
  if (k_re == stack.tags.end() || k_im == stack.tags.end()) {
    for (auto &c : out.channels) {
      c = Mirror(c);
    }
    return out;
  }
  auto const flipped =
    hflip_kspace(combine_cartesian(stack.channels[size_t(k_re - stack.tags.begin())], stack.channels[size_t(k_im - stack.tags.begin())]));
  auto const [mag, phase] = split_image_channels(ifft2_centered(flipped), 0);
  auto const [re, im] = split_kspace_channels(flipped, 0);
  for (size_t i = 0; i < out.tags.size(); i++) {
    switch (out.tags[i]) {
    case ChannelTag::MagImage:
      out.channels[i] = mag;
      break;
    case ChannelTag::PhaseImage:
      out.channels[i] = phase;
      break;
    case ChannelTag::RealK:
      out.channels[i] = re;
      break;
    case ChannelTag::ImagK:
      out.channels[i] = im;
      break;
    }
  }
  return out;
}

ChannelStack hflip_augment(ChannelStack const &stack, Rng &rng)
{
  return std::bernoulli_distribution(0.5)(rng) ? hflip(stack) : stack;
}

} // namespace kspnet
