#include "kspnet/metrics.hpp"
#include "kspnet/error.hpp"
#include "kspnet/parallel.hpp"
#include "kspnet/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace kspnet {

namespace {
void CheckInputs(std::span<double const> scores, std::span<int const> labels)
{
  if (scores.size() != labels.size()) {
    throw Error(ErrorKind::Shape, "scores and labels differ in length");
  }
  for (int l : labels) {
    if (l != 0 && l != 1) {
      throw Error(ErrorKind::Data, "labels must be 0 or 1");
    }
  }
  for (double s : scores) {
    if (!std::isfinite(s)) {
      throw Error(ErrorKind::Metric, "scores must be finite");
    }
  }
}

Index Positives(std::span<int const> labels) { return Index(std::count(labels.begin(), labels.end(), 1)); }

// Indices sorted by descending score; ties keep input order.
std::vector<size_t> DescendingOrder(std::span<double const> scores)
{
  std::vector<size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), size_t(0));
  std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return scores[a] > scores[b]; });
  return idx;
}

// Cumulative (tp, fp) after each distinct-threshold group, descending.
struct Step
{
  double threshold;
  Index tp;
  Index fp;
};

std::vector<Step> ThresholdSteps(std::span<double const> scores, std::span<int const> labels)
{
  auto const idx = DescendingOrder(scores);
  std::vector<Step> steps;
  Index tp = 0, fp = 0;
  for (size_t i = 0; i < idx.size(); i++) {
    if (labels[idx[i]] == 1) {
      tp++;
    } else {
      fp++;
    }
    if (i + 1 == idx.size() || scores[idx[i + 1]] != scores[idx[i]]) {
      steps.push_back({scores[idx[i]], tp, fp});
    }
  }
  return steps;
}
} // namespace

Ratio precision(ConfusionCounts const &c)
{
  Index const d = c.tp + c.fp;
  return d == 0 ? Ratio{0.0, true} : Ratio{double(c.tp) / double(d), false};
}

Ratio recall(ConfusionCounts const &c)
{
  Index const d = c.tp + c.fn;
  return d == 0 ? Ratio{0.0, true} : Ratio{double(c.tp) / double(d), false};
}

ConfusionCounts confusion_at(std::span<double const> scores, std::span<int const> labels, double threshold)
{
  CheckInputs(scores, labels);
  ConfusionCounts c;
  for (size_t i = 0; i < scores.size(); i++) {
    bool const predicted = scores[i] >= threshold;
    if (labels[i] == 1) {
      (predicted ? c.tp : c.fn)++;
    } else {
      (predicted ? c.fp : c.tn)++;
    }
  }
  return c;
}

double auroc(std::span<double const> scores, std::span<int const> labels)
{
  CheckInputs(scores, labels);
  Index const pos = Positives(labels);
  Index const neg = Index(labels.size()) - pos;
  if (pos == 0 || neg == 0) {
    throw Error(ErrorKind::Metric, "AUROC is undefined without both positive and negative samples");
  }
  std::vector<size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), size_t(0));
  std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return scores[a] < scores[b]; });
  // Twice the rank sum of the positives, with tied groups sharing their mean rank.
  long long twice_rank_sum = 0;
  for (size_t i = 0; i < idx.size();) {
    size_t j = i;
    Index group_pos = 0;
    while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) {
      group_pos += labels[idx[j]];
      j++;
    }
    // ranks i+1 .. j, mean (i + 1 + j) / 2
    twice_rank_sum += (long long)group_pos * (long long)(i + 1 + j);
    i = j;
  }
  long long const twice_u = twice_rank_sum - (long long)pos * (pos + 1);
  return double(twice_u) / (2.0 * double(pos) * double(neg));
}

double auprc(std::span<double const> scores, std::span<int const> labels)
{
  CheckInputs(scores, labels);
  Index const pos = Positives(labels);
  if (pos == 0) {
    throw Error(ErrorKind::Metric, "AUPRC is undefined without positive samples");
  }
  double ap = 0.0;
  Index prev_tp = 0;
  for (auto const &s : ThresholdSteps(scores, labels)) {
    ap += (double(s.tp - prev_tp) / double(pos)) * (double(s.tp) / double(s.tp + s.fp));
    prev_tp = s.tp;
  }
  return ap;
}

std::vector<CurvePoint> roc_curve(std::span<double const> scores, std::span<int const> labels)
{
  CheckInputs(scores, labels);
  Index const pos = Positives(labels);
  Index const neg = Index(labels.size()) - pos;
  if (pos == 0 || neg == 0) {
    throw Error(ErrorKind::Metric, "ROC curve is undefined without both classes");
  }
  std::vector<CurvePoint> pts{{std::numeric_limits<double>::infinity(), 0.0, 0.0}};
  for (auto const &s : ThresholdSteps(scores, labels)) {
    pts.push_back({s.threshold, double(s.fp) / double(neg), double(s.tp) / double(pos)});
  }
  return pts;
}

std::vector<CurvePoint> pr_curve(std::span<double const> scores, std::span<int const> labels)
{
  CheckInputs(scores, labels);
  Index const pos = Positives(labels);
  if (pos == 0) {
    throw Error(ErrorKind::Metric, "PR curve is undefined without positives");
  }
  std::vector<CurvePoint> pts;
  for (auto const &s : ThresholdSteps(scores, labels)) {
    pts.push_back({s.threshold, double(s.tp) / double(pos), double(s.tp) / double(s.tp + s.fp)});
  }
  return pts;
}

double roc_trapezoid(std::span<double const> scores, std::span<int const> labels)
{
  auto const pts = roc_curve(scores, labels);
  double area = 0.0;
  for (size_t i = 1; i < pts.size(); i++) {
    area += (pts[i].x - pts[i - 1].x) * 0.5 * (pts[i].y + pts[i - 1].y);
  }
  return area;
}

double Quantile(std::vector<double> values, double q)
{
  if (values.empty()) {
    throw Error(ErrorKind::Parameter, "quantile of an empty set");
  }
  std::sort(values.begin(), values.end());
  double const pos = q * double(values.size() - 1);
  size_t const lo = size_t(std::floor(pos));
  size_t const hi = std::min(lo + 1, values.size() - 1);
  double const frac = pos - double(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

namespace {
double Evaluate(Metric m, std::span<double const> s, std::span<int const> l)
{
  return m == Metric::AUROC ? auroc(s, l) : auprc(s, l);
}
} // namespace

Interval bootstrap_ci(
  std::span<double const> scores, std::span<int const> labels, Metric metric, Index iterations, std::uint64_t seed, int threads)
{
  CheckInputs(scores, labels);
  Index const n = Index(scores.size());
  if (n < 10) {
    throw Error(ErrorKind::Parameter, "bootstrap needs at least 10 samples, got " + std::to_string(n));
  }
  if (iterations < 1) {
    throw Error(ErrorKind::Parameter, "bootstrap needs at least one iteration");
  }
  Interval out;
  out.point = Evaluate(metric, scores, labels);

  std::vector<double> values(static_cast<size_t>(iterations));
  ParallelFor(iterations, threads, [&](Index it) {
    Rng rng = MakeRng({seed, std::uint64_t(it), 0x626f6f74ULL});
    std::uniform_int_distribution<Index> pick(0, n - 1);
    std::vector<double> s(static_cast<size_t>(n));
    std::vector<int> l(static_cast<size_t>(n));
    for (int attempt = 0; attempt < 10000; attempt++) {
      Index pos = 0;
      for (Index i = 0; i < n; i++) {
        Index const j = pick(rng);
        s[size_t(i)] = scores[size_t(j)];
        l[size_t(i)] = labels[size_t(j)];
        pos += l[size_t(i)];
      }
      if (pos > 0 && pos < n) {
        values[size_t(it)] = Evaluate(metric, s, l);
        return;
      }
    }
    throw Error(ErrorKind::Metric, "bootstrap could not draw a resample containing both classes");
  });

  // The reported interval always contains the full-sample estimate.
  out.low = std::min(Quantile(values, 0.025), out.point);
  out.high = std::max(Quantile(values, 0.975), out.point);
  double const mean = PairwiseSum(values) / double(iterations);
  double ss = 0.0;
  for (double v : values) {
    ss += (v - mean) * (v - mean);
  }
  out.stddev = iterations > 1 ? std::sqrt(ss / double(iterations - 1)) : 0.0;
  return out;
}

MetricReport evaluate_metrics(std::span<double const> scores, std::span<int const> labels, Index iterations, std::uint64_t seed, int threads)
{
  MetricReport r;
  r.auroc = bootstrap_ci(scores, labels, Metric::AUROC, iterations, seed, threads);
  r.auprc = bootstrap_ci(scores, labels, Metric::AUPRC, iterations, seed, threads);
  r.n_bootstrap = iterations;
  r.n = Index(scores.size());
  r.prevalence = double(Positives(labels)) / double(r.n);
  return r;
}

} // namespace kspnet
