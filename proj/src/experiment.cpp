#include "kspnet/experiment.hpp"
#include "kspnet/coils.hpp"
#include "kspnet/error.hpp"
#include "kspnet/parallel.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kspnet {

namespace {
void AddNoise(ComplexTensor &k, double sigma, Rng &rng)
{
  std::normal_distribution<double> gauss(0.0, sigma / std::sqrt(2.0));
  for (auto &z : k.data()) {
    double const re = gauss(rng);
    double const im = gauss(rng);
    z += Cx(re, im);
  }
}
} // namespace

std::vector<ComplexTensor> PrepareKSpace(
  ComplexTensor const &raw, std::span<Index const> factors, PipelineSettings const &settings, PhantomSpec const &spec, Index sample_id)
{
  Index const h = raw.height();
  auto const noisy = [&](Index factor) {
    ComplexTensor k = raw;
    double const target = snr_scaled_noise(spec, factor);
    double const extra = std::sqrt(std::max(0.0, target * target - spec.noise_sigma * spec.noise_sigma));
    if (extra > 0.0) {
      Rng rng = MakeRng({spec.seed, std::uint64_t(sample_id), 4, std::uint64_t(factor)});
      AddNoise(k, extra, rng);
    }
    return k;
  };

  std::vector<ComplexTensor> out;
  if (settings.kind == PipelineKind::PCA) {
    for (Index r : factors) {
      auto const mask = make_mask(h, r, settings.acs_lines);
      out.push_back(spec.snr_scaling ? proposed_pipeline(noisy(r), mask) : proposed_pipeline(raw, mask));
    }
    return out;
  }
  auto const native = make_mask(h, settings.native_factor, settings.native_acs);
  std::map<Index, ComplexTensor> filled_by_noise;
  for (Index r : factors) {
    // Without SNR scaling all factors share one reconstruction.
    Index const key = spec.snr_scaling ? r : 0;
    auto it = filled_by_noise.find(key);
    if (it == filled_by_noise.end()) {
      it = filled_by_noise.emplace(key, grappa_fill(spec.snr_scaling ? noisy(r) : raw, native, settings.grappa)).first;
    }
    auto const mask = make_mask(h, r, settings.acs_lines);
    out.push_back(pca_compress(apply_mask(it->second, mask), 1).compressed);
  }
  return out;
}

KSpaceCache::KSpaceCache(
  RawLoader const &load,
  std::vector<Index> ids,
  std::vector<int> labels,
  std::vector<Index> factors,
  PipelineSettings const &settings,
  PhantomSpec const &spec,
  int threads)
  : ids_(std::move(ids))
  , labels_(std::move(labels))
  , factors_(std::move(factors))
{
  if (ids_.size() != labels_.size()) {
    throw Error(ErrorKind::Shape, "sample ids and labels differ in length");
  }
  data_.resize(ids_.size() * factors_.size());
  std::vector<Index> heights(ids_.size()), widths(ids_.size());
  ParallelFor(Index(ids_.size()), threads, [&](Index pos) {
    auto const raw = load(ids_[size_t(pos)]);
    heights[size_t(pos)] = raw.height();
    widths[size_t(pos)] = raw.width();
    auto const ks = PrepareKSpace(raw, factors_, settings, spec, ids_[size_t(pos)]);
    for (size_t f = 0; f < factors_.size(); f++) {
      auto &dst = data_[size_t(pos) * factors_.size() + f];
      dst.reserve(ks[f].data().size());
      for (auto const &z : ks[f].data()) {
        dst.emplace_back(float(z.real()), float(z.imag()));
      }
    }
  });
  if (!ids_.empty()) {
    height_ = heights.front();
    width_ = widths.front();
    for (size_t i = 0; i < ids_.size(); i++) {
      if (heights[i] != height_ || widths[i] != width_) {
        throw Error(ErrorKind::Data, "samples differ in matrix size");
      }
    }
  }
}

ComplexTensor KSpaceCache::get(Index pos, Index factor) const
{
  auto const it = std::find(factors_.begin(), factors_.end(), factor);
  if (it == factors_.end()) {
    throw Error(ErrorKind::Parameter, "factor R=" + std::to_string(factor) + " was not prepared");
  }
  auto const &src = data_[size_t(pos) * factors_.size() + size_t(it - factors_.begin())];
  std::vector<Cx> data(src.begin(), src.end());
  return ComplexTensor({1, 1, height_, width_}, Domain::KSpace, std::move(data));
}

StackSource TrainingSource(KSpaceCache const &cache, ChannelSet channels, Index r_max, PipelineKind kind, std::uint64_t seed)
{
  return {cache.size(), [&cache, channels, r_max, kind, seed](Index pos, Index epoch) {
            Rng rng = MakeRng({seed, std::uint64_t(cache.id(pos)), std::uint64_t(epoch), 0x61756721ULL});
            Index const r = DrawFactor(r_max, rng);
            auto k = cache.get(pos, r);
            if (std::bernoulli_distribution(0.5)(rng)) {
              k = hflip_kspace(k);
            }
            return stack_channels(k, channels, cache.label(pos), {r, kind, cache.id(pos)});
          }};
}

StackSource ValidationSource(KSpaceCache const &cache, ChannelSet channels, Index r_max, PipelineKind kind, std::uint64_t seed)
{
  return {cache.size(), [&cache, channels, r_max, kind, seed](Index pos, Index) {
            Rng rng = MakeRng({seed, std::uint64_t(cache.id(pos)), 0x76616c21ULL});
            Index const r = DrawFactor(r_max, rng);
            return stack_channels(cache.get(pos, r), channels, cache.label(pos), {r, kind, cache.id(pos)});
          }};
}

std::vector<double> ScoreAt(Model const &model, KSpaceCache const &cache, Index factor, PipelineKind kind, Index batch_size, bool per_sample_norm, int threads)
{
  std::vector<ChannelStack> stacks(size_t(cache.size()));
  ParallelFor(cache.size(), threads, [&](Index pos) {
    stacks[size_t(pos)] = stack_channels(cache.get(pos, factor), model.channels, cache.label(pos), {factor, kind, cache.id(pos)});
  });
  return predict(model, std::move(stacks), batch_size, per_sample_norm, threads);
}

std::vector<EvalRow> EvaluateScores(std::span<ScoreRow const> rows, Index bootstrap, std::uint64_t seed, int threads)
{
  // Groups keep first-appearance order.
  std::vector<std::tuple<PipelineKind, ChannelSet, Index>> keys;
  std::vector<std::pair<std::vector<double>, std::vector<int>>> groups;
  for (auto const &r : rows) {
    auto const key = std::make_tuple(r.pipeline, r.channels, r.factor);
    auto it = std::find(keys.begin(), keys.end(), key);
    if (it == keys.end()) {
      keys.push_back(key);
      groups.emplace_back();
      it = keys.end() - 1;
    }
    auto &g = groups[size_t(it - keys.begin())];
    g.first.push_back(r.score);
    g.second.push_back(r.label);
  }
  std::vector<EvalRow> out;
  for (size_t i = 0; i < keys.size(); i++) {
    auto const &[p, c, f] = keys[i];
    out.push_back({p, c, f, evaluate_metrics(groups[i].first, groups[i].second, bootstrap, seed, threads)});
  }
  return out;
}

std::string EvalCsvHeader()
{
  return "pipeline,channels,R,auroc,auroc_lo,auroc_hi,auprc,auprc_lo,auprc_hi,n,auroc_sd,auprc_sd,prevalence\n";
}

std::string EvalCsvRow(EvalRow const &r)
{
  auto const &m = r.report;
  return fmt::format(
    "{},{},{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{},{:.6f},{:.6f},{:.6f}\n",
    ToString(r.pipeline),
    ToString(r.channels),
    r.factor,
    m.auroc.point,
    m.auroc.low,
    m.auroc.high,
    m.auprc.point,
    m.auprc.low,
    m.auprc.high,
    m.n,
    m.auroc.stddev,
    m.auprc.stddev,
    m.prevalence);
}

std::string ScoreCsvHeader() { return "pipeline,channels,R,id,score,label\n"; }

std::string ScoreCsvRow(ScoreRow const &r)
{
  return fmt::format("{},{},{},{},{:.17g},{}\n", ToString(r.pipeline), ToString(r.channels), r.factor, r.id, r.score, r.label);
}

std::vector<ScoreRow> ParseScoreCsv(std::string const &text)
{
  std::istringstream in(text);
  std::string line;
  std::vector<ScoreRow> rows;
  int lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    if (line.empty() || (lineno == 1 && line.rfind("pipeline,", 0) == 0)) {
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      f.push_back(cell);
    }
    if (f.size() != 6) {
      throw Error(ErrorKind::Data, "scores line " + std::to_string(lineno) + ": expected 6 columns");
    }
    try {
      rows.push_back(
        {ParsePipelineKind(f[0]), ParseChannelSet(f[1]), std::stol(f[2]), std::stol(f[3]), std::stod(f[4]), std::stoi(f[5])});
    } catch (std::logic_error const &) {
      throw Error(ErrorKind::Data, "scores line " + std::to_string(lineno) + ": unparsable value");
    } catch (Error const &e) {
      throw Error(ErrorKind::Data, "scores line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return rows;
}

std::string HistoryCsv(std::vector<EpochRecord> const &history)
{
  std::string out = "epoch,train_loss,val_loss,lr\n";
  for (auto const &h : history) {
    out += fmt::format("{},{:.17g},{:.17g},{:.17g}\n", h.epoch, h.train_loss, h.val_loss, h.lr);
  }
  return out;
}

} // namespace kspnet
