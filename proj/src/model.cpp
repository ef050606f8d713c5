#include "kspnet/model.hpp"
#include "kspnet/error.hpp"

#include <Eigen/Core>

#include <cmath>
#include <numbers>

namespace kspnet {

namespace {

using RMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RMap = Eigen::Map<RMat const>;

constexpr Index kTaps = 9;

// Row (c * 9 + ky * 3 + kx) of `col` holds channel c shifted by (ky - 1, kx - 1)
// with zero padding; columns are pixels.
void Im2Col(std::span<double const *const> in, Index h, Index w, RMat &col)
{
  Index const nc = Index(in.size());
  col.resize(nc * kTaps, h * w);
  for (Index c = 0; c < nc; c++) {
    double const *src = in[size_t(c)];
    for (Index ky = 0; ky < 3; ky++) {
      for (Index kx = 0; kx < 3; kx++) {
        double *dst = col.row(c * kTaps + ky * 3 + kx).data();
        Index const dy = ky - 1, dx = kx - 1;
        for (Index y = 0; y < h; y++) {
          Index const sy = y + dy;
          double *d = dst + y * w;
          if (sy < 0 || sy >= h) {
            std::fill_n(d, w, 0.0);
            continue;
          }
          double const *s = src + sy * w;
          for (Index x = 0; x < w; x++) {
            Index const sx = x + dx;
            d[x] = (sx >= 0 && sx < w) ? s[sx] : 0.0;
          }
        }
      }
    }
  }
}

// Adjoint of Im2Col: scatter-add columns back onto the channel planes.
void Col2Im(RMat const &dcol, Index nc, Index h, Index w, RMat &out)
{
  out.setZero(nc, h * w);
  for (Index c = 0; c < nc; c++) {
    double *dst = out.row(c).data();
    for (Index ky = 0; ky < 3; ky++) {
      for (Index kx = 0; kx < 3; kx++) {
        double const *src = dcol.row(c * kTaps + ky * 3 + kx).data();
        Index const dy = ky - 1, dx = kx - 1;
        for (Index y = 0; y < h; y++) {
          Index const sy = y + dy;
          if (sy < 0 || sy >= h) {
            continue;
          }
          double const *s = src + y * w;
          double *d = dst + sy * w;
          for (Index x = 0; x < w; x++) {
            Index const sx = x + dx;
            if (sx >= 0 && sx < w) {
              d[sx] += s[x];
            }
          }
        }
      }
    }
  }
}

struct Cache
{
  Index h = 0, w = 0, h2 = 0, w2 = 0;
  RMat col1, z1, col2, z2;
  Eigen::VectorXd g;
};

struct Views
{
  RMap w1, w2, wf;
  Eigen::Map<Eigen::VectorXd const> b1, b2, bf;
};

Views ViewsOf(Classifier const &net)
{
  Index const in = net.in_channels();
  return {
    RMap(net.conv1_weight().data(), Classifier::kConv1, in * kTaps),
    RMap(net.conv2_weight().data(), Classifier::kConv2, Classifier::kConv1 * kTaps),
    RMap(net.fc_weight().data(), Classifier::kClasses, Classifier::kConv2),
    Eigen::Map<Eigen::VectorXd const>(net.conv1_bias().data(), Classifier::kConv1),
    Eigen::Map<Eigen::VectorXd const>(net.conv2_bias().data(), Classifier::kConv2),
    Eigen::Map<Eigen::VectorXd const>(net.fc_bias().data(), Classifier::kClasses)};
}

Logits Forward(Classifier const &net, std::span<RealPlane const *const> inputs, Cache &cache)
{
  if (Index(inputs.size()) != net.in_channels()) {
    throw Error(
      ErrorKind::Shape,
      "classifier expects " + std::to_string(net.in_channels()) + " channels, got " + std::to_string(inputs.size()));
  }
  Index const h = inputs.front()->height(), w = inputs.front()->width();
  std::vector<double const *> planes;
  for (auto const *p : inputs) {
    if (p->height() != h || p->width() != w) {
      throw Error(ErrorKind::Shape, "classifier input planes differ in shape");
    }
    planes.push_back(p->data().data());
  }
  auto const v = ViewsOf(net);
  cache.h = h;
  cache.w = w;
  cache.h2 = h / 2;
  cache.w2 = w / 2;

  Im2Col(planes, h, w, cache.col1);
  cache.z1.noalias() = v.w1 * cache.col1;
  cache.z1.colwise() += v.b1;

  Index const h2 = cache.h2, w2 = cache.w2;
  RMat pooled(Classifier::kConv1, h2 * w2);
  for (Index c = 0; c < Classifier::kConv1; c++) {
    double const *a = cache.z1.row(c).data();
    double *p = pooled.row(c).data();
    for (Index y = 0; y < h2; y++) {
      double const *r0 = a + (2 * y) * w;
      double const *r1 = r0 + w;
      for (Index x = 0; x < w2; x++) {
        p[y * w2 + x] = 0.25 * (std::max(r0[2 * x], 0.0) + std::max(r0[2 * x + 1], 0.0) +
                                std::max(r1[2 * x], 0.0) + std::max(r1[2 * x + 1], 0.0));
      }
    }
  }

  std::vector<double const *> pooled_planes;
  for (Index c = 0; c < Classifier::kConv1; c++) {
    pooled_planes.push_back(pooled.row(c).data());
  }
  Im2Col(pooled_planes, h2, w2, cache.col2);
  cache.z2.noalias() = v.w2 * cache.col2;
  cache.z2.colwise() += v.b2;

  cache.g = cache.z2.cwiseMax(0.0).rowwise().mean();
  Eigen::Vector2d const logits = v.wf * cache.g + v.bf;
  return {logits(0), logits(1)};
}

void Backward(Classifier const &net, Cache const &cache, Logits const &dlogits, std::span<double> grad)
{
  auto const v = ViewsOf(net);
  Index const in = net.in_channels();
  auto const blocks = net.blocks();
  auto GradMap = [&](int b, Index rows, Index cols) {
    return Eigen::Map<RMat>(grad.data() + blocks[size_t(b)].offset, rows, cols);
  };
  auto dw1 = GradMap(0, Classifier::kConv1, in * kTaps);
  auto db1 = GradMap(1, Classifier::kConv1, 1);
  auto dw2 = GradMap(2, Classifier::kConv2, Classifier::kConv1 * kTaps);
  auto db2 = GradMap(3, Classifier::kConv2, 1);
  auto dwf = GradMap(4, Classifier::kClasses, Classifier::kConv2);
  auto dbf = GradMap(5, Classifier::kClasses, 1);

  Eigen::Vector2d const dl(dlogits[0], dlogits[1]);
  dwf.noalias() += dl * cache.g.transpose();
  dbf += dl;
  Eigen::VectorXd const dg = v.wf.transpose() * dl;

  Index const n2 = cache.h2 * cache.w2;
  RMat dz2(Classifier::kConv2, n2);
  for (Index c = 0; c < Classifier::kConv2; c++) {
    double const s = dg(c) / double(n2);
    for (Index p = 0; p < n2; p++) {
      dz2(c, p) = cache.z2(c, p) > 0.0 ? s : 0.0;
    }
  }
  dw2.noalias() += dz2 * cache.col2.transpose();
  db2 += dz2.rowwise().sum();

  RMat const dcol2 = v.w2.transpose() * dz2;
  RMat dpool;
  Col2Im(dcol2, Classifier::kConv1, cache.h2, cache.w2, dpool);

  Index const h = cache.h, w = cache.w;
  RMat dz1 = RMat::Zero(Classifier::kConv1, h * w);
  for (Index c = 0; c < Classifier::kConv1; c++) {
    double const *z = cache.z1.row(c).data();
    double const *dp = dpool.row(c).data();
    double *d = dz1.row(c).data();
    for (Index y = 0; y < cache.h2; y++) {
      for (Index x = 0; x < cache.w2; x++) {
        double const g = 0.25 * dp[y * cache.w2 + x];
        for (Index i : {(2 * y) * w + 2 * x, (2 * y) * w + 2 * x + 1, (2 * y + 1) * w + 2 * x, (2 * y + 1) * w + 2 * x + 1}) {
          d[i] = z[i] > 0.0 ? g : 0.0;
        }
      }
    }
  }
  dw1.noalias() += dz1 * cache.col1.transpose();
  db1 += dz1.rowwise().sum();
}

std::vector<RealPlane const *> Select(ChannelStack const &stack, bool want_kspace)
{
  std::vector<RealPlane const *> out;
  for (size_t i = 0; i < stack.tags.size(); i++) {
    if (IsKSpaceTag(stack.tags[i]) == want_kspace) {
      out.push_back(&stack.channels[i]);
    }
  }
  return out;
}

std::vector<RealPlane const *> All(ChannelStack const &stack)
{
  std::vector<RealPlane const *> out;
  for (auto const &c : stack.channels) {
    out.push_back(&c);
  }
  return out;
}

void CheckStack(ChannelStack const &stack)
{
  if (stack.channels.empty() || stack.channels.size() != stack.tags.size()) {
    throw Error(ErrorKind::Shape, "channel stack is empty or inconsistent");
  }
}

std::pair<std::vector<RealPlane const *>, std::vector<RealPlane const *>> DualInputs(ChannelStack const &stack)
{
  CheckStack(stack);
  auto image = Select(stack, false);
  auto kspace = Select(stack, true);
  if (image.empty() || kspace.empty()) {
    throw Error(ErrorKind::Shape, "dual network needs both image-domain and k-space channels");
  }
  return {std::move(image), std::move(kspace)};
}

} // namespace

Classifier::Classifier(Index in_channels)
  : in_channels_(in_channels)
{
  if (in_channels < 1) {
    throw Error(ErrorKind::Parameter, "classifier needs at least one input channel");
  }
  Index total = 0;
  for (auto const &b : blocks()) {
    total += b.size;
  }
  params_.assign(size_t(total), 0.0);
}

std::vector<Classifier::Block> Classifier::blocks() const
{
  std::vector<Block> b;
  Index offset = 0;
  auto add = [&](std::string name, Index size) {
    b.push_back({std::move(name), offset, size});
    offset += size;
  };
  add("conv1.weight", kConv1 * in_channels_ * kTaps);
  add("conv1.bias", kConv1);
  add("conv2.weight", kConv2 * kConv1 * kTaps);
  add("conv2.bias", kConv2);
  add("fc.weight", kClasses * kConv2);
  add("fc.bias", kClasses);
  return b;
}

std::span<double const> Classifier::block(int i) const
{
  auto const b = blocks()[size_t(i)];
  return std::span<double const>(params_).subspan(size_t(b.offset), size_t(b.size));
}

Classifier Classifier::He(Index in_channels, Rng &rng)
{
  Classifier net(in_channels);
  auto const blocks = net.blocks();
  Index const fan_in[] = {in_channels * kTaps, 0, kConv1 * kTaps, 0, kConv2, 0};
  for (size_t b = 0; b < blocks.size(); b++) {
    if (fan_in[b] == 0) {
      continue;
    }
    std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / double(fan_in[b])));
    for (Index i = 0; i < blocks[b].size; i++) {
      net.params_[size_t(blocks[b].offset + i)] = dist(rng);
    }
  }
  return net;
}

Index Model::parameter_count() const
{
  Index n = 0;
  for (auto const &b : branches) {
    n += b.parameter_count();
  }
  return n;
}

Model MakeModel(ChannelSet channels, std::uint64_t seed)
{
  Rng rng = MakeRng({seed, 0x6d6f64656cULL});
  Model model{channels, {}};
  Index const n = Index(Tags(channels).size());
  if (channels == ChannelSet::MagK) {
    model.branches.push_back(Classifier::He(1, rng));
    model.branches.push_back(Classifier::He(2, rng));
  } else {
    model.branches.push_back(Classifier::He(n, rng));
  }
  return model;
}

Logits forward(Classifier const &net, ChannelStack const &stack)
{
  CheckStack(stack);
  Cache cache;
  return Forward(net, All(stack), cache);
}

Logits dual_forward(Classifier const &image_net, Classifier const &kspace_net, ChannelStack const &stack)
{
  auto const [image, kspace] = DualInputs(stack);
  Cache ci, ck;
  Logits const a = Forward(image_net, image, ci);
  Logits const b = Forward(kspace_net, kspace, ck);
  return {0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
}

Logits forward(Model const &model, ChannelStack const &stack)
{
  return model.dual() ? dual_forward(model.branches[0], model.branches[1], stack) : forward(model.branches[0], stack);
}

double weighted_ce_loss(Logits const &l, int label, std::array<double, 2> const &weights)
{
  double const mx = std::max(l[0], l[1]);
  double const lse = mx + std::log(std::exp(l[0] - mx) + std::exp(l[1] - mx));
  return -weights[size_t(label)] * (l[size_t(label)] - lse);
}

Logits weighted_ce_grad(Logits const &l, int label, std::array<double, 2> const &weights)
{
  double const p1 = predict_proba(l);
  double const w = weights[size_t(label)];
  return {w * ((1.0 - p1) - (label == 0 ? 1.0 : 0.0)), w * (p1 - (label == 1 ? 1.0 : 0.0))};
}

double predict_proba(Logits const &l)
{
  double const d = l[0] - l[1];
  if (d >= 0.0) {
    double const e = std::exp(-d);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(d));
}

std::vector<double> backward_logits(Classifier const &net, std::span<RealPlane const *const> inputs, Logits const &dlogits)
{
  Cache cache;
  Forward(net, inputs, cache);
  std::vector<double> grad(size_t(net.parameter_count()), 0.0);
  Backward(net, cache, dlogits, grad);
  return grad;
}

Gradients backward(Classifier const &net, ChannelStack const &stack, int label, std::array<double, 2> const &weights)
{
  CheckStack(stack);
  Cache cache;
  auto const inputs = All(stack);
  Logits const l = Forward(net, inputs, cache);
  Gradients g{weighted_ce_loss(l, label, weights), {std::vector<double>(size_t(net.parameter_count()), 0.0)}};
  Backward(net, cache, weighted_ce_grad(l, label, weights), g.branches[0]);
  return g;
}

Gradients backward(Model const &model, ChannelStack const &stack, int label, std::array<double, 2> const &weights)
{
  if (!model.dual()) {
    return backward(model.branches[0], stack, label, weights);
  }
  auto const [image, kspace] = DualInputs(stack);
  Cache ci, ck;
  Logits const a = Forward(model.branches[0], image, ci);
  Logits const b = Forward(model.branches[1], kspace, ck);
  Logits const mean{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
  Logits const dmean = weighted_ce_grad(mean, label, weights);
  Logits const half{0.5 * dmean[0], 0.5 * dmean[1]};
  Gradients g{weighted_ce_loss(mean, label, weights), {}};
  g.branches.emplace_back(size_t(model.branches[0].parameter_count()), 0.0);
  g.branches.emplace_back(size_t(model.branches[1].parameter_count()), 0.0);
  Backward(model.branches[0], ci, half, g.branches[0]);
  Backward(model.branches[1], ck, half, g.branches[1]);
  return g;
}

void adam_step(std::span<double> params, std::span<double const> grads, AdamState &state, Index t, double lr, AdamConfig const &cfg)
{
  if (t < 1) {
    throw Error(ErrorKind::Parameter, "Adam step index must be >= 1");
  }
  if (grads.size() != params.size()) {
    throw Error(ErrorKind::Shape, "gradient and parameter sizes differ");
  }
  if (state.m.size() != params.size()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
  }
  double const c1 = 1.0 - std::pow(cfg.beta1, double(t));
  double const c2 = 1.0 - std::pow(cfg.beta2, double(t));
  for (size_t i = 0; i < params.size(); i++) {
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grads[i];
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grads[i] * grads[i];
    double const mhat = state.m[i] / c1;
    double const vhat = state.v[i] / c2;
    params[i] -= lr * mhat / (std::sqrt(vhat) + cfg.epsilon);
  }
}

double cosine_lr(Index t, Index total, double lr0)
{
  if (t < 0 || t > total || total < 1) {
    throw Error(ErrorKind::Parameter, "cosine schedule step " + std::to_string(t) + " outside [0, " + std::to_string(total) + "]");
  }
  return lr0 * 0.5 * (1.0 + std::cos(std::numbers::pi * double(t) / double(total)));
}

} // namespace kspnet
