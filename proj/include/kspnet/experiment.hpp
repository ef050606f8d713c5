#pragma once

#include "metrics.hpp"
#include "phantom.hpp"
#include "pipeline.hpp"
#include "train.hpp"

#include <complex>
#include <functional>
#include <map>

namespace kspnet {

/// How raw multi-coil data becomes single-coil k-space at a digital factor R.
struct PipelineSettings
{
  PipelineKind kind = PipelineKind::PCA;
  Index acs_lines = 0;     // ACS rows kept by digital undersampling
  Index native_factor = 2; // GRAPPA path: acquisition factor reconstructed first
  Index native_acs = 24;
  GrappaSettings grappa;
};

/// Single-coil k-space of one raw sample for each requested factor.
/// PCA: proposed_pipeline at R. GRAPPA: one reconstruction at the native
/// factor, then digital undersampling at R and PCA compression.
/// With spec.snr_scaling the sample receives extra noise so its total noise
/// std is snr_scaled_noise(spec, R).
std::vector<ComplexTensor> PrepareKSpace(
  ComplexTensor const &raw,
  std::span<Index const> factors,
  PipelineSettings const &settings,
  PhantomSpec const &spec,
  Index sample_id);

using RawLoader = std::function<ComplexTensor(Index id)>;

/// Single-coil k-space for a set of samples and factors, kept in single precision.
class KSpaceCache
{
public:
  KSpaceCache(
    RawLoader const &load,
    std::vector<Index> ids,
    std::vector<int> labels,
    std::vector<Index> factors,
    PipelineSettings const &settings,
    PhantomSpec const &spec,
    int threads);

  Index size() const { return Index(ids_.size()); }
  Index id(Index pos) const { return ids_[size_t(pos)]; }
  int label(Index pos) const { return labels_[size_t(pos)]; }
  ComplexTensor get(Index pos, Index factor) const;

private:
  std::vector<Index> ids_;
  std::vector<int> labels_;
  std::vector<Index> factors_;
  Index height_ = 0, width_ = 0;
  std::vector<std::vector<std::complex<float>>> data_; // [pos * n_factors + f]
};

/// Training view: each (sample, epoch) draws R from the augmentation set and a
/// random horizontal flip from its own generator.
StackSource TrainingSource(KSpaceCache const &cache, ChannelSet channels, Index r_max, PipelineKind kind, std::uint64_t seed);
/// Validation view: one fixed augmentation draw per sample, no flips.
StackSource ValidationSource(KSpaceCache const &cache, ChannelSet channels, Index r_max, PipelineKind kind, std::uint64_t seed);

struct EvalRow
{
  PipelineKind pipeline;
  ChannelSet channels;
  Index factor;
  MetricReport report;
};

struct ScoreRow
{
  PipelineKind pipeline;
  ChannelSet channels;
  Index factor;
  Index id;
  double score;
  int label;
};

/// Scores every cached sample at one factor.
std::vector<double> ScoreAt(Model const &model, KSpaceCache const &cache, Index factor, PipelineKind kind, Index batch_size, bool per_sample_norm, int threads);

/// Groups score rows by (pipeline, channels, R) and computes bootstrap metrics.
std::vector<EvalRow> EvaluateScores(std::span<ScoreRow const> rows, Index bootstrap, std::uint64_t seed, int threads);

std::string EvalCsvHeader();
std::string EvalCsvRow(EvalRow const &row);
std::string ScoreCsvHeader();
std::string ScoreCsvRow(ScoreRow const &row);
std::vector<ScoreRow> ParseScoreCsv(std::string const &text);

std::string HistoryCsv(std::vector<EpochRecord> const &history);

} // namespace kspnet
