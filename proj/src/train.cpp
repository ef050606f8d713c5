#include "kspnet/train.hpp"
#include "kspnet/error.hpp"
#include "kspnet/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace kspnet {

void TrainConfig::validate() const
{
  if (!(lr0 > 0.0) || !(adam.beta1 > 0.0 && adam.beta1 < 1.0) || !(adam.beta2 > 0.0 && adam.beta2 < 1.0) ||
      !(adam.epsilon > 0.0) || patience < 1 || batch_size < 1 || max_epochs < 1 || class_weights[0] <= 0.0 ||
      class_weights[1] <= 0.0 || threads < 1) {
    throw Error(ErrorKind::Config, "training configuration has a non-positive or out-of-range value");
  }
}

EarlyStopping::EarlyStopping(Index patience)
  : patience_(patience)
  , best_loss_(std::numeric_limits<double>::infinity())
{
}

bool EarlyStopping::update(Index epoch, double loss)
{
  if (loss < best_loss_) {
    best_loss_ = loss;
    best_epoch_ = epoch;
    stale_ = 0;
    return true;
  }
  stale_++;
  return false;
}

namespace {

std::vector<ChannelStack> Fetch(StackSource const &src, std::span<Index const> ids, Index epoch, int threads)
{
  std::vector<ChannelStack> out(ids.size());
  ParallelFor(Index(ids.size()), threads, [&](Index i) { out[size_t(i)] = src.get(ids[size_t(i)], epoch); });
  return out;
}

void Normalize(std::vector<ChannelStack> &batch, bool per_sample)
{
  if (per_sample) {
    normalize_each(batch);
  } else {
    normalize_batch(batch);
  }
}

void CheckFinite(double v, char const *what)
{
  if (!std::isfinite(v)) {
    throw Error(ErrorKind::Numeric, std::string("non-finite ") + what + " during training");
  }
}

} // namespace

double evaluate_loss(Model const &model, StackSource const &source, TrainConfig const &cfg)
{
  std::vector<double> losses(size_t(source.size));
  std::vector<Index> ids(size_t(source.size));
  std::iota(ids.begin(), ids.end(), Index(0));
  for (Index start = 0; start < source.size; start += cfg.batch_size) {
    Index const n = std::min(cfg.batch_size, source.size - start);
    auto batch = Fetch(source, std::span(ids).subspan(size_t(start), size_t(n)), 0, cfg.threads);
    Normalize(batch, cfg.per_sample_norm);
    ParallelFor(n, cfg.threads, [&](Index i) {
      auto const &s = batch[size_t(i)];
      losses[size_t(start + i)] = weighted_ce_loss(forward(model, s), s.label, cfg.class_weights);
    });
  }
  return PairwiseSum(losses) / double(source.size);
}

TrainResult train(Model model, StackSource const &train_set, StackSource const &val_set, TrainConfig const &cfg)
{
  cfg.validate();
  if (train_set.size < 1 || val_set.size < 1) {
    throw Error(ErrorKind::Parameter, "training and validation sets must be non-empty");
  }
  Index const batches = (train_set.size + cfg.batch_size - 1) / cfg.batch_size;
  Index const total_steps = cfg.max_epochs * batches;

  std::vector<AdamState> adam(model.branches.size());
  TrainResult result{model, {}, 0, 0};
  EarlyStopping stopper(cfg.patience);
  Index step = 0;
  std::vector<Index> order(size_t(train_set.size));

  for (Index epoch = 1; epoch <= cfg.max_epochs; epoch++) {
    std::iota(order.begin(), order.end(), Index(0));
    Rng shuffle_rng = MakeRng({cfg.seed, std::uint64_t(epoch), 0x73687566ULL});
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    std::vector<double> batch_losses;
    double lr = cfg.lr0;
    for (Index b = 0; b < batches; b++) {
      Index const start = b * cfg.batch_size;
      Index const n = std::min(cfg.batch_size, train_set.size - start);
      auto batch = Fetch(train_set, std::span(order).subspan(size_t(start), size_t(n)), epoch, cfg.threads);
      Normalize(batch, cfg.per_sample_norm);

      std::vector<Gradients> grads(static_cast<size_t>(n));
      ParallelFor(n, cfg.threads, [&](Index i) {
        auto const &s = batch[size_t(i)];
        grads[size_t(i)] = backward(model, s, s.label, cfg.class_weights);
      });

      std::vector<double> losses;
      for (auto const &g : grads) {
        losses.push_back(g.loss);
      }
      double const loss = PairwiseSum(losses) / double(n);
      CheckFinite(loss, "training loss");
      batch_losses.push_back(loss * double(n));

      lr = cosine_lr(step, total_steps, cfg.lr0);
      step++;
      for (size_t br = 0; br < model.branches.size(); br++) {
        std::vector<std::vector<double>> terms;
        terms.reserve(grads.size());
        for (auto &g : grads) {
          terms.push_back(std::move(g.branches[br]));
        }
        auto sum = PairwiseSum(std::move(terms));
        for (auto &v : sum) {
          v /= double(n);
        }
        adam_step(model.branches[br].params(), sum, adam[br], step, lr, cfg.adam);
      }
    }

    double const train_loss = PairwiseSum(batch_losses) / double(train_set.size);
    double const val_loss = evaluate_loss(model, val_set, cfg);
    CheckFinite(val_loss, "validation loss");
    result.history.push_back({epoch, train_loss, val_loss, lr});
    if (stopper.update(epoch, val_loss)) {
      result.model = model;
    }
    result.stopped_epoch = epoch;
    if (stopper.should_stop()) {
      break;
    }
  }
  result.best_epoch = stopper.best_epoch();
  return result;
}

std::vector<double> predict(Model const &model, std::vector<ChannelStack> stacks, Index batch_size, bool per_sample_norm, int threads)
{
  std::vector<double> scores(stacks.size());
  Index const total = Index(stacks.size());
  for (Index start = 0; start < total; start += batch_size) {
    Index const n = std::min(batch_size, total - start);
    std::span<ChannelStack> batch(stacks.data() + start, size_t(n));
    if (per_sample_norm) {
      normalize_each(batch);
    } else {
      normalize_batch(batch);
    }
    ParallelFor(n, threads, [&](Index i) { scores[size_t(start + i)] = predict_proba(forward(model, batch[size_t(i)])); });
  }
  return scores;
}

} // namespace kspnet
