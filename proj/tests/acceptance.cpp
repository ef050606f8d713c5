#include "model_oracle.hpp"
#include "support.hpp"

#include "kspnet/coils.hpp"
#include "kspnet/experiment.hpp"
#include "kspnet/grappa.hpp"
#include "kspnet/metrics.hpp"
#include "kspnet/phantom.hpp"
#include "kspnet/pipeline.hpp"
#include "kspnet/sampling.hpp"
#include "kspnet/train.hpp"

#include <fmt/core.h>

#include <chrono>
#include <cstring>
#include <functional>
#include <optional>
#include <string>
#include <vector>

using namespace kspnet;
using namespace kspnet::testing;

namespace {

struct Outcome
{
  bool pass = false;
  std::string detail;
  std::string fingerprint; // non-timing outputs, compared byte-for-byte on rerun
};

double Seconds(std::function<void()> const &f)
{
  auto const t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <typename Range>
void AppendBytes(std::string &out, Range const &values)
{
  out.append(reinterpret_cast<char const *>(values.data()), values.size() * sizeof(values[0]));
}

double Nrmse(RealPlane const &estimate, RealPlane const &truth)
{
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < truth.data().size(); i++) {
    double const d = estimate.data()[i] - truth.data()[i];
    num += d * d;
    den += truth.data()[i] * truth.data()[i];
  }
  return std::sqrt(num / den);
}

double Median(std::vector<double> v)
{
  std::sort(v.begin(), v.end());
  size_t const n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Outcome FftOracle()
{
  double worst = 0.0, round_trip = 0.0;
  double const t = Seconds([&] {
    for (Index n : {4, 8, 13, 16}) {
      auto const x = RandomTensor({1, 1, n, n}, Domain::Image, std::uint64_t(n));
      worst = std::max(worst, MaxAbsDiff(fft2_centered(x).plane(0, 0), DirectDft(x.plane(0, 0), n, n, false)));
      auto const k = RandomTensor({1, 1, n, n}, Domain::KSpace, std::uint64_t(n + 50));
      worst = std::max(worst, MaxAbsDiff(ifft2_centered(k).plane(0, 0), DirectDft(k.plane(0, 0), n, n, true)));
    }
    auto const x = RandomTensor({1, 1, 100, 100}, Domain::Image, 100);
    round_trip = MaxAbsDiff(ifft2_centered(fft2_centered(x)).data(), x.data());
  });
  return {worst < 1e-6 && round_trip < 1e-6 && t < 1.0,
          fmt::format("max |fft - DFT| {:.2e}, round trip {:.2e}, {:.3f} s", worst, round_trip, t), {}};
}

Outcome PlantedGrappa()
{
  std::vector<double> errors;
  double const t = Seconds([&] {
    for (Index r : {2, 4}) {
      auto const truth = PlantedKSpace(32, 8, std::uint64_t(200 + r));
      auto const mask = make_mask(32, r, 20);
      auto const under = apply_mask(truth, mask);
      auto const kernel = calibrate(ExtractAcs(under, mask), r, {}, 1e-10);
      errors.push_back(RelativeError(reconstruct(under, kernel, mask).data(), truth.data()));
    }
  });
  bool const pass = errors[0] < 1e-6 && errors[1] < 1e-6 && t < 10.0;
  return {pass, fmt::format("relative error R=2 {:.2e}, R=4 {:.2e}, {:.2f} s", errors[0], errors[1], t), {}};
}

Outcome PhantomGrappa()
{
  PhantomSpec spec; // 16 coils, 100 x 100
  bool ok = true;
  double worst2 = 0.0;
  std::string fp;
  std::string trend;
  double const t = Seconds([&] {
    for (Index id = 0; id < 5; id++) {
      auto const raw = make_sample(spec, id).kspace;
      auto const full = standard_pipeline(raw, make_mask(100, 1, 0)).magnitude;
      auto const r2 = standard_pipeline(raw, make_mask(100, 2, 24)).magnitude;
      auto const r4 = standard_pipeline(raw, make_mask(100, 4, 24)).magnitude;
      double const e2 = Nrmse(r2, full), e4 = Nrmse(r4, full);
      ok = ok && e2 < 0.05 && e4 >= e2;
      worst2 = std::max(worst2, e2);
      trend += fmt::format(" {:.3f}/{:.3f}", e2, e4);
      AppendBytes(fp, r2.data());
      AppendBytes(fp, r4.data());
    }
  });
  return {ok && t < 60.0,
          fmt::format("NRMSE R=2/R=4 per slice:{}; worst R=2 {:.4f}, {:.1f} s", trend, worst2, t), fp};
}

Outcome PcaOracle()
{
  double worst = 0.0, energy = 0.0;
  for (Index nc = 4; nc <= 8; nc++) {
    for (std::uint64_t rep = 0; rep < 4; rep++) {
      auto k = RandomTensor({1, nc, 10 + Index(rep), 12}, Domain::KSpace, 1000 * std::uint64_t(nc) + rep);
      Rng rng(rep + 7);
      for (Index c = 0; c < nc; c++) {
        double const gain = std::uniform_real_distribution<double>(0.2, 3.0)(rng);
        for (auto &z : k.plane(0, c)) {
          z *= gain;
        }
      }
      auto const r = pca_compress(k, nc);
      auto const ev = HermitianEigenvalues(CoilGram(k), nc);
      double total = 0.0;
      for (double v : ev) {
        total += v;
      }
      for (Index c = 0; c < nc; c++) {
        worst = std::max(worst, std::abs(r.explained_variance[size_t(c)] - ev[size_t(c)] / total));
      }
      energy = std::max(energy, std::abs(r.compressed.energy() - k.energy()) / k.energy());
    }
  }
  return {worst < 1e-8 && energy < 1e-6,
          fmt::format("max explained-variance error {:.2e}, full-rank energy error {:.2e}", worst, energy), {}};
}

Outcome MetricOracle()
{
  Rng rng(2024);
  int cases = 0, mismatches = 0;
  while (cases < 1000) {
    Index const n = std::uniform_int_distribution<Index>(2, 12)(rng);
    std::vector<double> s(static_cast<size_t>(n));
    std::vector<int> l(static_cast<size_t>(n));
    for (Index i = 0; i < n; i++) {
      s[size_t(i)] = double(std::uniform_int_distribution<int>(0, 6)(rng)) / 6.0;
      l[size_t(i)] = std::bernoulli_distribution(0.4)(rng) ? 1 : 0;
    }
    auto const pos = std::count(l.begin(), l.end(), 1);
    if (pos == 0 || pos == n) {
      continue;
    }
    mismatches += auroc(s, l) != PairwiseAuroc(s, l) || auprc(s, l) != EnumeratedAuprc(s, l);
    cases++;
  }
  double sum = 0.0;
  int const trials = 400;
  for (int t = 0; t < trials; t++) {
    std::vector<double> s(2000);
    std::vector<int> l(2000);
    for (size_t i = 0; i < s.size(); i++) {
      s[i] = std::uniform_real_distribution<double>()(rng);
      l[i] = std::bernoulli_distribution(0.051)(rng) ? 1 : 0;
    }
    sum += auprc(s, l);
  }
  double const mean = sum / trials;
  return {mismatches == 0 && std::abs(mean - 0.051) < 0.01,
          fmt::format("{} brute-force mismatches in {} cases; random-ranking mean AUPRC {:.4f}", mismatches, cases, mean),
          {}};
}

Outcome GradientOracle()
{
  ChannelSet const sets[] = {ChannelSet::Mag, ChannelSet::MagPhase, ChannelSet::MagK};
  int accepted = 0, skipped = 0;
  Index params = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; accepted < 20 && seed < 1000; seed++) {
    ChannelSet const set = sets[seed % 3];
    auto const model = MakeModel(set, seed + 500);
    auto const s = RandomStack(set, 6, seed + 900, int(seed % 2));
    auto const r = CheckGradients(model, s, 1e-3);
    if (!r.smooth) {
      skipped++;
      continue;
    }
    worst = std::max(worst, r.worst);
    params += r.checked;
    accepted++;
  }
  return {accepted == 20 && worst < 1e-4,
          fmt::format(
            "{} cases, {} parameter checks, worst relative error {:.2e} ({} draws skipped: a +-h step crossed a ReLU kink)",
            accepted, params, worst, skipped),
          {}};
}

Outcome PipelineSpeed()
{
  PhantomSpec spec; // 16 coils, 100 x 100
  auto const mask = make_mask(100, 2, 24);
  std::vector<double> proposed_t, standard_t;
  std::string fp;
  for (Index i = 0; i < 50; i++) {
    auto const raw = make_sample(spec, i).kspace;
    std::optional<ComplexTensor> proposed;
    std::optional<StandardResult> standard;
    proposed_t.push_back(Seconds([&] { proposed = proposed_pipeline(raw, mask); }));
    standard_t.push_back(Seconds([&] { standard = standard_pipeline(raw, mask); }));
    AppendBytes(fp, proposed->data());
    AppendBytes(fp, standard->magnitude.data());
  }
  double const mp = Median(proposed_t), ms = Median(standard_t);
  double total = 0.0;
  for (size_t i = 0; i < proposed_t.size(); i++) {
    total += proposed_t[i] + standard_t[i];
  }
  return {mp <= 0.2 * ms && total < 120.0,
          fmt::format("median proposed {:.4f} s, standard {:.4f} s, ratio {:.3f} over 50 slices", mp, ms, mp / ms),
          fp};
}

// Phase-informative phantoms: lesions raise the magnitude and add a phase shift.
PhantomSpec TrendSpec()
{
  PhantomSpec spec;
  spec.matrix = 48;
  spec.n_coil = 8;
  spec.n_avg = 2;
  spec.noise_sigma = 0.05;
  spec.snr_scaling = true;
  spec.lesion_prob = 1.0 / 18.0;
  spec.lesion_radius_min = 0.06;
  spec.lesion_radius_max = 0.1;
  spec.lesion_contrast_min = 0.5;
  spec.lesion_contrast_max = 1.0;
  spec.lesion_phase_min = 1.5;
  spec.lesion_phase_max = 3.0;
  spec.seed = 7;
  return spec;
}

Outcome Trend()
{
  auto const spec = TrendSpec();
  auto const manifest = make_dataset(spec, 3800, {0.64, 0.1, 0.26});
  std::vector<Index> ids[3];
  std::vector<int> labels[3];
  for (auto const &e : manifest.samples) {
    ids[int(e.split)].push_back(e.id);
    labels[int(e.split)].push_back(e.label);
  }
  PipelineSettings pipeline;
  pipeline.acs_lines = 4;
  auto const load = [&](Index id) { return make_sample(spec, id).kspace; };
  Index const r_max = 8;
  std::vector<Index> const test_factors{1, 2, 16};

  std::string fp;
  std::string detail;
  std::vector<double> mean[2];
  double const t = Seconds([&] {
    auto const factors = AugmentFactors(r_max);
    KSpaceCache const train_cache(load, ids[0], labels[0], factors, pipeline, spec, 1);
    KSpaceCache const val_cache(load, ids[1], labels[1], factors, pipeline, spec, 1);
    KSpaceCache const test_cache(load, ids[2], labels[2], test_factors, pipeline, spec, 1);
    ChannelSet const sets[] = {ChannelSet::Mag, ChannelSet::MagK};
    for (int m = 0; m < 2; m++) {
      mean[m].assign(test_factors.size(), 0.0);
      for (std::uint64_t seed = 0; seed < 5; seed++) {
        TrainConfig cfg;
        cfg.lr0 = 3e-3;
        cfg.max_epochs = 25;
        cfg.per_sample_norm = true;
        cfg.seed = seed;
        auto const result = train(
          MakeModel(sets[m], seed),
          TrainingSource(train_cache, sets[m], r_max, PipelineKind::PCA, seed),
          ValidationSource(val_cache, sets[m], r_max, PipelineKind::PCA, seed),
          cfg);
        for (auto const &b : result.model.branches) {
          AppendBytes(fp, b.params());
        }
        for (size_t f = 0; f < test_factors.size(); f++) {
          auto const scores =
            ScoreAt(result.model, test_cache, test_factors[f], PipelineKind::PCA, cfg.batch_size, true, 1);
          for (Index i = 0; i < test_cache.size(); i++) {
            fp += ScoreCsvRow({PipelineKind::PCA, sets[m], test_factors[f], test_cache.id(i), scores[size_t(i)], test_cache.label(i)});
          }
          mean[m][f] += auroc(scores, labels[2]) / 5.0;
        }
      }
    }
  });
  bool const easy = mean[0][0] > 0.9 && mean[0][1] > 0.9 && mean[1][0] > 0.9 && mean[1][1] > 0.9;
  bool const trend = mean[1][2] >= mean[0][2];
  Index positives = 0;
  for (int l : labels[2]) {
    positives += l;
  }
  detail = fmt::format(
    "{} train / {} test ({} positive); mean AUROC mag R1 {:.3f} R2 {:.3f} R16 {:.3f} | mag+k R1 {:.3f} R2 {:.3f} R16 {:.3f}; {:.0f} s",
    ids[0].size(), ids[2].size(), positives, mean[0][0], mean[0][1], mean[0][2], mean[1][0], mean[1][1], mean[1][2], t);
  return {easy && trend && t < 1800.0 && ids[0].size() >= 2400 && ids[2].size() >= 500, detail, fp};
}

void Report(int id, char const *name, Outcome const &o, bool &all)
{
  fmt::print("{} {} {}: {}\n", o.pass ? "PASS" : "FAIL", id, name, o.detail);
  std::fflush(stdout);
  all = all && o.pass;
}

} // namespace

int main()
{
  bool all = true;
  Report(1, "fft oracle", FftOracle(), all);
  Report(2, "planted grappa", PlantedGrappa(), all);
  auto const c3 = PhantomGrappa();
  Report(3, "grappa phantom fidelity", c3, all);
  Report(4, "pca oracle", PcaOracle(), all);
  Report(5, "metric oracle", MetricOracle(), all);
  Report(6, "gradient check", GradientOracle(), all);
  auto const c7 = PipelineSpeed();
  Report(7, "pipeline speed", c7, all);
  auto const c8 = Trend();
  Report(8, "undersampling trend", c8, all);

  bool const same3 = PhantomGrappa().fingerprint == c3.fingerprint;
  bool const same7 = PipelineSpeed().fingerprint == c7.fingerprint;
  bool const same8 = Trend().fingerprint == c8.fingerprint;
  Outcome const c9{
    same3 && same7 && same8 && !c3.fingerprint.empty() && !c7.fingerprint.empty() && !c8.fingerprint.empty(),
    fmt::format(
      "rerun outputs identical: criterion 3 {}, 7 {}, 8 {} ({} / {} / {} bytes)", same3, same7, same8,
      c3.fingerprint.size(), c7.fingerprint.size(), c8.fingerprint.size()),
    {}};
  Report(9, "determinism", c9, all);
  return all ? 0 : 1;
}
