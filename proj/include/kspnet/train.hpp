#pragma once

#include "model.hpp"

#include <functional>

namespace kspnet {

struct TrainConfig
{
  double lr0 = 1e-4;
  AdamConfig adam;
  Index patience = 10; // epochs without validation improvement before stopping
  std::array<double, 2> class_weights = kDefaultClassWeights;
  Index batch_size = 32;
  Index max_epochs = 50;
  std::uint64_t seed = 0;
  int threads = 1;
  bool per_sample_norm = false;

  void validate() const;
};

/// Deterministic source of labeled stacks. `get(i, epoch)` must return the same
/// stack for the same arguments; training passes epoch >= 1, validation 0.
struct StackSource
{
  Index size = 0;
  std::function<ChannelStack(Index index, Index epoch)> get;
};

struct EpochRecord
{
  Index epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double lr = 0.0; // learning rate of the epoch's last step
  bool operator==(EpochRecord const &) const = default;
};

struct TrainResult
{
  Model model; // weights of the best validation epoch
  std::vector<EpochRecord> history;
  Index best_epoch = 0;
  Index stopped_epoch = 0;
};

/// Patience-based early stopping on a loss that should decrease.
class EarlyStopping
{
public:
  explicit EarlyStopping(Index patience);

  /// Records an epoch's loss; returns true if it is the best so far.
  bool update(Index epoch, double loss);
  bool should_stop() const { return stale_ >= patience_; }
  Index best_epoch() const { return best_epoch_; }
  double best_loss() const { return best_loss_; }

private:
  Index patience_;
  Index stale_ = 0;
  Index best_epoch_ = 0;
  double best_loss_;
};

/// Adam with cosine annealing over max_epochs * batches_per_epoch steps,
/// per-batch normalization, class-weighted cross-entropy and early stopping.
TrainResult train(Model model, StackSource const &train_set, StackSource const &val_set, TrainConfig const &cfg);

/// Mean weighted loss over a source, normalized in consecutive batches.
double evaluate_loss(Model const &model, StackSource const &source, TrainConfig const &cfg);

/// Class-1 probabilities for stacks normalized in consecutive batches of batch_size.
std::vector<double> predict(Model const &model, std::vector<ChannelStack> stacks, Index batch_size, bool per_sample_norm, int threads);

} // namespace kspnet
