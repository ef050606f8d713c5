#include "support.hpp"

#include "kspnet/coils.hpp"
#include "kspnet/error.hpp"
#include "kspnet/phantom.hpp"
#include "kspnet/pipeline.hpp"

#include <doctest.h>

using namespace kspnet;
using namespace kspnet::testing;

namespace {
PhantomSpec Spec()
{
  PhantomSpec s;
  s.matrix = 64;
  s.n_coil = 8;
  s.n_avg = 2;
  s.seed = 3;
  return s;
}
} // namespace

TEST_CASE("proposed pipeline equals mask, average sum and compression")
{
  auto const raw = make_sample(Spec(), 0).kspace;
  auto const mask = make_mask(64, 4, 8);
  auto const out = proposed_pipeline(raw, mask);
  auto const ref = pca_compress(sum_averages(apply_mask(raw, mask)), 1).compressed;
  CHECK(out.dims() == Dims4{1, 1, 64, 64});
  CHECK(MaxAbsDiff(out.data(), ref.data()) < 1e-10);
  CHECK(masked_average_sum(raw, mask) == sum_averages(apply_mask(raw, mask)));
}

TEST_CASE("standard pipeline at R=1 is the RSS image")
{
  auto const sample = make_sample(Spec(), 1);
  auto const mask = make_mask(64, 1, 0);
  auto const res = standard_pipeline(sample.kspace, mask);
  auto const rss = rss_combine(ifft2_centered(sum_averages(sample.kspace)));
  CHECK(res.magnitude == rss);
  CHECK(res.kspace.n_coil() == 1);
  auto const with_maps = standard_pipeline(sample.kspace, mask, {}, &sample.smaps);
  CHECK(with_maps.magnitude.height() == 64);
}

TEST_CASE("GRAPPA fill restores a phantom at R=2")
{
  auto spec = Spec();
  spec.noise_sigma = 0.0;
  auto const raw = make_sample(spec, 2).kspace;
  auto const full = sum_averages(raw);
  auto const filled = grappa_fill(raw, make_mask(64, 2, 24));
  CHECK(RelativeError(filled.data(), full.data()) < 0.05);
}

TEST_CASE("channel stacks")
{
  auto const k = proposed_pipeline(make_sample(Spec(), 0).kspace, make_mask(64, 2, 0));
  auto const mag = stack_channels(k, ChannelSet::Mag, 1, {2, PipelineKind::PCA, 0});
  CHECK(mag.channels.size() == 1);
  CHECK(mag.label == 1);
  CHECK(mag.meta.factor == 2);
  auto const mp = stack_channels(k, ChannelSet::MagPhase);
  CHECK(mp.tags == std::vector<ChannelTag>{ChannelTag::MagImage, ChannelTag::PhaseImage});
  auto const mk = stack_channels(k, ChannelSet::MagK);
  REQUIRE(mk.channels.size() == 3);
  CHECK(mk.channels[1](10, 20) == k(0, 0, 10, 20).real());
  CHECK(mk.channels[2](10, 20) == k(0, 0, 10, 20).imag());
  CHECK(mk.channels[0] == mag.channels[0]);
  auto const multi = sum_averages(make_sample(Spec(), 0).kspace);
  CHECK_THROWS_AS(stack_channels(multi, ChannelSet::Mag), Error);
  CHECK(ParseChannelSet(ToString(ChannelSet::MagK)) == ChannelSet::MagK);
  CHECK(ParsePipelineKind("grappa") == PipelineKind::GRAPPA);
  CHECK_THROWS_AS(ParseChannelSet("k"), Error);
}

TEST_CASE("batch normalization standardizes each channel")
{
  auto const k1 = proposed_pipeline(make_sample(Spec(), 0).kspace, make_mask(64, 1, 0));
  auto const k2 = proposed_pipeline(make_sample(Spec(), 1).kspace, make_mask(64, 1, 0));
  std::vector<ChannelStack> batch{stack_channels(k1, ChannelSet::MagK), stack_channels(k2, ChannelSet::MagK)};
  normalize_batch(batch);
  for (size_t c = 0; c < 3; c++) {
    double sum = 0.0, ss = 0.0, n = 0.0;
    for (auto const &s : batch) {
      for (double v : s.channels[c].data()) {
        sum += v;
        ss += v * v;
        n += 1.0;
      }
    }
    CHECK(std::abs(sum / n) < 1e-10);
    CHECK(ss / n == doctest::Approx(1.0).epsilon(1e-10));
  }
  std::vector<ChannelStack> flat{stack_channels(k1, ChannelSet::Mag)};
  for (double &v : flat[0].channels[0].data()) {
    v = 3.0;
  }
  normalize_each(flat);
  for (double v : flat[0].channels[0].data()) {
    CHECK(v == 0.0);
  }
}

TEST_CASE("horizontal flips")
{
  auto const k = proposed_pipeline(make_sample(Spec(), 4).kspace, make_mask(64, 2, 0));
  auto const mag = stack_channels(k, ChannelSet::Mag);
  auto const f = hflip(mag);
  CHECK(f.channels[0](7, 0) == mag.channels[0](7, 63));
  CHECK(hflip(f).channels[0] == mag.channels[0]);
  auto const mk = stack_channels(k, ChannelSet::MagK);
  auto const fk = hflip(mk);
  auto const direct = stack_channels(hflip_kspace(k), ChannelSet::MagK);
  for (size_t c = 0; c < 3; c++) {
    for (size_t i = 0; i < direct.channels[c].data().size(); i++) {
      CHECK(std::abs(fk.channels[c].data()[i] - direct.channels[c].data()[i]) < 1e-12);
    }
  }
  for (Index y = 0; y < 64; y++) {
    for (Index x = 0; x < 64; x++) {
      CHECK(std::abs(fk.channels[0](y, x) - mk.channels[0](y, 63 - x)) < 1e-9);
    }
  }
  Rng rng(5);
  int flipped = 0;
  for (int i = 0; i < 200; i++) {
    flipped += hflip_augment(mag, rng).channels[0] == mag.channels[0] ? 0 : 1;
  }
  CHECK(flipped > 70);
  CHECK(flipped < 130);
}
