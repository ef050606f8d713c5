#pragma once

#include "ctensor.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace kspnet {

struct ConfusionCounts
{
  Index tp = 0;
  Index fp = 0;
  Index tn = 0;
  Index fn = 0;

  Index n() const { return tp + fp + tn + fn; }
};

/// A ratio whose denominator may be zero; then value = 0 and degenerate = true.
struct Ratio
{
  double value = 0.0;
  bool degenerate = false;
};

Ratio precision(ConfusionCounts const &c);
Ratio recall(ConfusionCounts const &c);

/// Counts with "score >= threshold" predicted positive.
ConfusionCounts confusion_at(std::span<double const> scores, std::span<int const> labels, double threshold);

/// P(s+ > s-) + P(s+ = s-)/2 from ranks. Throws unless both classes are present.
double auroc(std::span<double const> scores, std::span<int const> labels);

/// Average precision: sum over descending distinct thresholds of
/// (recall_i - recall_{i-1}) * precision_i. Throws without positives.
double auprc(std::span<double const> scores, std::span<int const> labels);

struct CurvePoint
{
  double threshold;
  double x; // FPR for ROC, recall for PR
  double y; // TPR for ROC, precision for PR
};

/// ROC points from (0, 0) to (1, 1), one per distinct threshold.
std::vector<CurvePoint> roc_curve(std::span<double const> scores, std::span<int const> labels);
std::vector<CurvePoint> pr_curve(std::span<double const> scores, std::span<int const> labels);
/// Trapezoidal area under roc_curve.
double roc_trapezoid(std::span<double const> scores, std::span<int const> labels);

enum class Metric
{
  AUROC,
  AUPRC
};

struct Interval
{
  double point = 0.0;  // full-sample estimate
  double low = 0.0;    // 2.5th percentile of the bootstrap distribution
  double high = 0.0;   // 97.5th percentile
  double stddev = 0.0; // bootstrap standard deviation
};

/// Percentile bootstrap. Iteration i resamples with its own generator derived
/// from (seed, i); resamples missing a class are redrawn.
Interval bootstrap_ci(
  std::span<double const> scores,
  std::span<int const> labels,
  Metric metric,
  Index iterations = 1000,
  std::uint64_t seed = 0,
  int threads = 1);

struct MetricReport
{
  Interval auroc;
  Interval auprc;
  Index n_bootstrap = 0;
  Index n = 0;
  double prevalence = 0.0;
};

MetricReport evaluate_metrics(
  std::span<double const> scores, std::span<int const> labels, Index iterations = 1000, std::uint64_t seed = 0, int threads = 1);

/// Linear-interpolated quantile of unsorted values, q in [0, 1].
double Quantile(std::vector<double> values, double q);

} // namespace kspnet
