#include "kspnet/coils.hpp"
#include "kspnet/error.hpp"
#include "kspnet/experiment.hpp"

#include <doctest.h>

using namespace kspnet;

namespace {
PhantomSpec Spec()
{
  PhantomSpec s;
  s.matrix = 48;
  s.n_coil = 6;
  s.n_avg = 2;
  s.seed = 2;
  return s;
}
} // namespace

TEST_CASE("prepared k-space follows the configured pipeline")
{
  auto const spec = Spec();
  auto const raw = make_sample(spec, 0).kspace;
  std::vector<Index> const factors{1, 4};
  PipelineSettings pca;
  auto const a = PrepareKSpace(raw, factors, pca, spec, 0);
  REQUIRE(a.size() == 2);
  CHECK(a[1] == proposed_pipeline(raw, make_mask(48, 4, 0)));

  PipelineSettings grappa;
  grappa.kind = PipelineKind::GRAPPA;
  auto const g = PrepareKSpace(raw, factors, grappa, spec, 0);
  auto const filled = grappa_fill(raw, make_mask(48, 2, 24));
  CHECK(g[1] == pca_compress(apply_mask(filled, make_mask(48, 4, 0)), 1).compressed);
}

TEST_CASE("SNR scaling adds noise growing with R")
{
  auto spec = Spec();
  spec.noise_sigma = 0.0;
  auto const raw = make_sample(spec, 1).kspace;
  auto scaled = spec;
  scaled.snr_scaling = true;
  std::vector<Index> const factors{1, 4};
  auto const plain = PrepareKSpace(raw, factors, {}, spec, 1);
  auto const noisy = PrepareKSpace(raw, factors, {}, scaled, 1);
  // Zero base noise means no extra noise either.
  CHECK(plain[1] == noisy[1]);
  spec.noise_sigma = scaled.noise_sigma = 0.1;
  auto const p1 = PrepareKSpace(raw, factors, {}, spec, 1);
  auto const s1 = PrepareKSpace(raw, factors, {}, scaled, 1);
  CHECK(p1[0] == s1[0]);
  CHECK_FALSE(p1[1] == s1[1]);
}

TEST_CASE("cache and sources are deterministic")
{
  auto const spec = Spec();
  auto const load = [&](Index id) { return make_sample(spec, id).kspace; };
  std::vector<Index> ids{0, 1, 2, 3};
  std::vector<int> labels{0, 1, 0, 1};
  KSpaceCache const cache(load, ids, labels, AugmentFactors(8), {}, spec, 2);
  CHECK(cache.size() == 4);
  CHECK(cache.label(1) == 1);
  auto const k = cache.get(2, 4);
  CHECK(k.dims() == Dims4{1, 1, 48, 48});
  CHECK_THROWS_AS(cache.get(2, 16), Error);
  auto const direct = proposed_pipeline(load(2), make_mask(48, 4, 0));
  size_t mismatches = 0;
  for (size_t i = 0; i < k.data().size(); i++) {
    std::complex<double> const expected(std::complex<float>(direct.data()[i]));
    mismatches += k.data()[i] != expected;
  }
  CHECK(mismatches == 0);

  auto const train = TrainingSource(cache, ChannelSet::MagK, 8, PipelineKind::PCA, 11);
  CHECK(train.get(1, 3).channels == train.get(1, 3).channels);
  CHECK(train.get(1, 3).label == 1);
  bool varies = false;
  for (Index e = 1; e < 8; e++) {
    varies |= train.get(0, e).meta.factor != train.get(0, 1).meta.factor;
  }
  CHECK(varies);
  auto const val = ValidationSource(cache, ChannelSet::Mag, 8, PipelineKind::PCA, 11);
  CHECK(val.get(3, 0).channels == val.get(3, 5).channels);
}

TEST_CASE("score CSV round trip and grouping")
{
  std::vector<ScoreRow> rows;
  for (int i = 0; i < 30; i++) {
    rows.push_back({PipelineKind::PCA, ChannelSet::Mag, 2, i, i / 30.0, i % 3 == 0});
    rows.push_back({PipelineKind::GRAPPA, ChannelSet::MagK, 8, i, 1.0 - i / 30.0, i % 3 == 0});
  }
  std::string csv = ScoreCsvHeader();
  for (auto const &r : rows) {
    csv += ScoreCsvRow(r);
  }
  auto const back = ParseScoreCsv(csv);
  REQUIRE(back.size() == rows.size());
  CHECK(back[5].score == rows[5].score);
  CHECK(back[5].channels == ChannelSet::MagK);
  auto const eval = EvaluateScores(back, 100, 1, 1);
  REQUIRE(eval.size() == 2);
  CHECK(eval[0].pipeline == PipelineKind::PCA);
  CHECK(eval[1].factor == 8);
  CHECK(eval[0].report.n == 30);
  CHECK(eval[0].report.auroc.point + eval[1].report.auroc.point == doctest::Approx(1.0));
  CHECK_THROWS_AS(ParseScoreCsv("pca,mag,1,2\n"), Error);
  CHECK_THROWS_AS(ParseScoreCsv("pca,mag,x,2,0.5,1\n"), Error);
}
