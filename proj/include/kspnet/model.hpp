#pragma once

#include "pipeline.hpp"
#include "random.hpp"

#include <array>
#include <span>
#include <string>
#include <vector>

namespace kspnet {

using Logits = std::array<double, 2>;

/// Compact CNN branch:
///   conv3x3(in -> 8) + ReLU + 2x2 mean-pool + conv3x3(8 -> 16) + ReLU
///   + global mean-pool + affine(16 -> 2).
/// Convolutions are stride 1 with zero "same" padding. Parameters live in one
/// flat vector split into named blocks.
class Classifier
{
public:
  static constexpr Index kConv1 = 8;
  static constexpr Index kConv2 = 16;
  static constexpr Index kClasses = 2;

  struct Block
  {
    std::string name;
    Index offset;
    Index size;
  };

  explicit Classifier(Index in_channels);

  /// He-scaled Gaussian weights, zero biases.
  static Classifier He(Index in_channels, Rng &rng);

  Index in_channels() const { return in_channels_; }
  Index parameter_count() const { return Index(params_.size()); }
  std::vector<Block> blocks() const;

  std::span<double> params() { return params_; }
  std::span<double const> params() const { return params_; }

  std::span<double const> conv1_weight() const { return block(0); }
  std::span<double const> conv1_bias() const { return block(1); }
  std::span<double const> conv2_weight() const { return block(2); }
  std::span<double const> conv2_bias() const { return block(3); }
  std::span<double const> fc_weight() const { return block(4); }
  std::span<double const> fc_bias() const { return block(5); }

  bool operator==(Classifier const &) const = default;

private:
  std::span<double const> block(int i) const;

  Index in_channels_;
  std::vector<double> params_;
};

/// One branch (single network) or two (image-domain branch and k-space branch
/// whose logits are averaged).
struct Model
{
  ChannelSet channels = ChannelSet::Mag;
  std::vector<Classifier> branches;

  bool dual() const { return branches.size() == 2; }
  Index parameter_count() const;
  bool operator==(Model const &) const = default;
};

/// Magnitude+k-space stacks get the dual layout; the other channel sets a single branch.
Model MakeModel(ChannelSet channels, std::uint64_t seed);

Logits forward(Classifier const &net, ChannelStack const &stack);
Logits dual_forward(Classifier const &image_net, Classifier const &kspace_net, ChannelStack const &stack);
Logits forward(Model const &model, ChannelStack const &stack);

inline constexpr std::array<double, 2> kDefaultClassWeights{1.0, 17.0};

/// -w[label] * log softmax(logits)[label], evaluated with max subtraction.
double weighted_ce_loss(Logits const &logits, int label, std::array<double, 2> const &weights = kDefaultClassWeights);
/// Derivative of weighted_ce_loss with respect to the logits.
Logits weighted_ce_grad(Logits const &logits, int label, std::array<double, 2> const &weights = kDefaultClassWeights);

/// Softmax probability of class 1.
double predict_proba(Logits const &logits);

struct Gradients
{
  double loss = 0.0;
  std::vector<std::vector<double>> branches; // same layout as each branch's params()
};

/// Loss and exact parameter gradients for one labeled stack.
Gradients backward(Classifier const &net, ChannelStack const &stack, int label, std::array<double, 2> const &weights = kDefaultClassWeights);
Gradients backward(Model const &model, ChannelStack const &stack, int label, std::array<double, 2> const &weights = kDefaultClassWeights);

/// Parameter gradients of one branch for a given upstream logit gradient.
std::vector<double> backward_logits(Classifier const &net, std::span<RealPlane const *const> inputs, Logits const &dlogits);

struct AdamConfig
{
  double beta1 = 0.9;
  double beta2 = 0.99;
  double epsilon = 1e-8;
};

struct AdamState
{
  std::vector<double> m;
  std::vector<double> v;
};

/// Bias-corrected Adam update at step t >= 1.
void adam_step(std::span<double> params, std::span<double const> grads, AdamState &state, Index t, double lr, AdamConfig const &cfg = {});

/// lr0 * (1 + cos(pi * t / T)) / 2 for 0 <= t <= T.
double cosine_lr(Index t, Index total, double lr0);

} // namespace kspnet
