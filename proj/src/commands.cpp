#include "kspnet/commands.hpp"
#include "kspnet/coils.hpp"
#include "kspnet/error.hpp"
#include "kspnet/grappa.hpp"
#include "kspnet/io.hpp"
#include "kspnet/parallel.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

namespace kspnet {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) { return std::chrono::duration<double>(Clock::now() - since).count(); }

template <typename F>
double Timed(F &&f)
{
  auto const t0 = Clock::now();
  f();
  return Seconds(t0);
}

void WriteText(fs::path const &path, std::string const &text)
{
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    throw IoError(IoErrc::WriteFailed, "cannot write '" + path.string() + "'");
  }
}

std::string ReadText(fs::path const &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError(IoErrc::OpenFailed, "cannot read '" + path.string() + "'");
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void Log(std::string const &msg) { fmt::print(stderr, "{}\n", msg); }

struct Dataset
{
  DatasetManifest manifest;
  fs::path root;

  ComplexTensor load(Index id) const
  {
    for (auto const &e : manifest.samples) {
      if (e.id == id) {
        return read_ksp(root / e.path);
      }
    }
    throw Error(ErrorKind::Data, "sample " + std::to_string(id) + " is not in the manifest");
  }
  std::vector<int> labels(std::vector<Index> const &ids) const
  {
    std::vector<int> out;
    for (Index id : ids) {
      auto const it = std::find_if(manifest.samples.begin(), manifest.samples.end(), [&](auto const &e) { return e.id == id; });
      out.push_back(it->label);
    }
    return out;
  }
};

Dataset OpenDataset(Settings const &s)
{
  if (s.data.empty()) {
    throw Error(ErrorKind::Config, "data: no dataset directory given (set 'data' to the output of 'generate')");
  }
  return {read_manifest(s.data / "manifest.json"), s.data};
}

/// Raw sample for run/plot: from the dataset when one is configured, else synthesized.
ComplexTensor RawSample(Settings const &s)
{
  if (!s.data.empty()) {
    return OpenDataset(s).load(s.sample);
  }
  return make_sample(s.phantom, s.sample).kspace;
}

std::vector<Index> Indices(std::vector<long> const &v) { return {v.begin(), v.end()}; }

RealPlane LogMagnitude(ComplexTensor const &k)
{
  RealPlane out(k.height(), k.width());
  for (Index y = 0; y < k.height(); y++) {
    for (Index x = 0; x < k.width(); x++) {
      out(y, x) = std::log1p(std::abs(k(0, 0, y, x)));
    }
  }
  return out;
}

RealPlane Magnitude(ComplexTensor const &img)
{
  return split_image_channels(img, 0).first;
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

fs::path CheckpointPath(Settings const &s, Index seed_index)
{
  if (s.seeds == 1) {
    return s.out / "model.kspw";
  }
  return s.out / fmt::format("model_s{}.kspw", seed_index);
}

} // namespace

Settings ResolveSettings(Config cfg, CliOverrides const &flags)
{
  if (flags.seed) {
    cfg.set("seed", std::to_string(*flags.seed));
  }
  if (flags.out) {
    cfg.set("out", *flags.out);
  }
  if (flags.r_grid) {
    cfg.set("r_grid", *flags.r_grid);
  }
  if (flags.channels) {
    cfg.set("channels", *flags.channels);
  }
  if (flags.pipeline) {
    cfg.set("pipeline", *flags.pipeline);
  }
  if (flags.threads) {
    cfg.set("threads", std::to_string(*flags.threads));
  }

  Settings s;
  ConfigBinder b(cfg);
  std::string out = s.out.string(), data, channels = ToString(s.channels), pipeline = ToString(s.pipeline.kind);
  std::string checkpoint, scores;
  std::vector<long> r_grid(s.r_grid.begin(), s.r_grid.end());
  b.bind("seed", s.seed);
  b.bind("threads", s.threads);
  b.bind("out", out);
  b.bind("data", data);

  auto &p = s.phantom;
  b.bind("phantom.matrix", p.matrix);
  b.bind("phantom.coils", p.n_coil);
  b.bind("phantom.averages", p.n_avg);
  b.bind("phantom.noise_sigma", p.noise_sigma);
  b.bind("phantom.lesion_prob", p.lesion_prob);
  b.bind("phantom.lesion_radius_min", p.lesion_radius_min);
  b.bind("phantom.lesion_radius_max", p.lesion_radius_max);
  b.bind("phantom.lesion_contrast_min", p.lesion_contrast_min);
  b.bind("phantom.lesion_contrast_max", p.lesion_contrast_max);
  b.bind("phantom.lesion_phase_min", p.lesion_phase_min);
  b.bind("phantom.lesion_phase_max", p.lesion_phase_max);
  b.bind("phantom.phase_strength", p.phase_strength);
  b.bind("phantom.snr_scaling", p.snr_scaling);
  b.bind("dataset.samples", s.n_samples);
  b.bind("dataset.train_fraction", s.split.train);
  b.bind("dataset.val_fraction", s.split.val);
  b.bind("dataset.test_fraction", s.split.test);

  b.bind("pipeline", pipeline);
  b.bind("channels", channels);
  b.bind("r_grid", r_grid);
  b.bind("acs_lines", s.pipeline.acs_lines);
  b.bind("native_factor", s.pipeline.native_factor);
  b.bind("native_acs", s.pipeline.native_acs);
  b.bind("grappa.ky", s.pipeline.grappa.taps.ky);
  b.bind("grappa.kx", s.pipeline.grappa.taps.kx);
  b.bind("grappa.lambda", s.pipeline.grappa.lambda_rel);

  auto &t = s.train;
  b.bind("train.lr", t.lr0);
  b.bind("train.beta1", t.adam.beta1);
  b.bind("train.beta2", t.adam.beta2);
  b.bind("train.epsilon", t.adam.epsilon);
  b.bind("train.batch_size", t.batch_size);
  b.bind("train.max_epochs", t.max_epochs);
  b.bind("train.patience", t.patience);
  b.bind("train.weight_negative", t.class_weights[0]);
  b.bind("train.weight_positive", t.class_weights[1]);
  b.bind("train.per_sample_norm", t.per_sample_norm);
  b.bind("train.r_max", s.r_max);
  b.bind("train.seeds", s.seeds);

  b.bind("eval.bootstrap", s.bootstrap);
  b.bind("eval.checkpoint", checkpoint);
  b.bind("eval.scores", scores);
  b.bind("bench.slices", s.bench_slices);
  b.bind("sample", s.sample);
  b.bind("factor", s.factor);

  try {
    s.channels = ParseChannelSet(channels);
  } catch (Error const &e) {
    b.error(std::string("channels: ") + e.what());
  }
  try {
    s.pipeline.kind = ParsePipelineKind(pipeline);
  } catch (Error const &e) {
    b.error(std::string("pipeline: ") + e.what());
  }
  s.r_grid = Indices(r_grid);
  if (std::any_of(s.r_grid.begin(), s.r_grid.end(), [&](Index r) { return r < 1 || r > p.matrix; })) {
    b.error("r_grid: factors must lie in [1, phantom.matrix]");
  }
  if (s.threads < 1) {
    b.error("threads: must be at least 1");
  }
  if (s.seeds < 1) {
    b.error("train.seeds: must be at least 1");
  }
  if (s.r_max < 1) {
    b.error("train.r_max: must be at least 1");
  }
  if (s.bootstrap < 1) {
    b.error("eval.bootstrap: must be at least 1");
  }
  if (s.bench_slices < 1) {
    b.error("bench.slices: must be at least 1");
  }
  if (s.n_samples < 20) {
    b.error("dataset.samples: must be at least 20");
  }
  auto const check = [&](std::string const &prefix, auto const &validate) {
    try {
      validate();
    } catch (Error const &e) {
      b.error(prefix + e.what());
    }
  };
  check("phantom: ", [&] { p.validate(); });
  check("train: ", [&] { t.validate(); });
  b.finish();

  p.seed = s.seed;
  t.seed = s.seed;
  t.threads = s.threads;
  s.out = out;
  s.data = data;
  s.checkpoint = checkpoint.empty() ? s.out / "model.kspw" : fs::path(checkpoint);
  s.scores = scores;
  return s;
}

std::string DefaultConfigText()
{
  Settings const s;
  auto const &p = s.phantom;
  auto const &t = s.train;
  std::string grid;
  for (Index r : s.r_grid) {
    grid += (grid.empty() ? "" : ",") + std::to_string(r);
  }
  return fmt::format(
    "seed = {}\nthreads = {}\nout = {}\ndata =\n"
    "phantom.matrix = {}\nphantom.coils = {}\nphantom.averages = {}\nphantom.noise_sigma = {}\n"
    "phantom.lesion_prob = {:.17g}\nphantom.lesion_radius_min = {}\nphantom.lesion_radius_max = {}\n"
    "phantom.lesion_contrast_min = {}\nphantom.lesion_contrast_max = {}\n"
    "phantom.lesion_phase_min = {}\nphantom.lesion_phase_max = {}\nphantom.phase_strength = {:.17g}\n"
    "phantom.snr_scaling = {}\n"
    "dataset.samples = {}\ndataset.train_fraction = {}\ndataset.val_fraction = {}\ndataset.test_fraction = {}\n"
    "pipeline = {}\nchannels = {}\nr_grid = {}\nacs_lines = {}\nnative_factor = {}\nnative_acs = {}\n"
    "grappa.ky = {}\ngrappa.kx = {}\ngrappa.lambda = {}\n"
    "train.lr = {}\ntrain.beta1 = {}\ntrain.beta2 = {}\ntrain.epsilon = {}\ntrain.batch_size = {}\n"
    "train.max_epochs = {}\ntrain.patience = {}\ntrain.weight_negative = {}\ntrain.weight_positive = {}\n"
    "train.per_sample_norm = {}\ntrain.r_max = {}\ntrain.seeds = {}\n"
    "eval.bootstrap = {}\neval.checkpoint =\neval.scores =\nbench.slices = {}\nsample = {}\nfactor = {}\n",
    s.seed, s.threads, s.out.string(),
    p.matrix, p.n_coil, p.n_avg, p.noise_sigma, p.lesion_prob, p.lesion_radius_min, p.lesion_radius_max,
    p.lesion_contrast_min, p.lesion_contrast_max, p.lesion_phase_min, p.lesion_phase_max, p.phase_strength,
    p.snr_scaling, s.n_samples, s.split.train, s.split.val, s.split.test,
    ToString(s.pipeline.kind), ToString(s.channels), grid, s.pipeline.acs_lines, s.pipeline.native_factor,
    s.pipeline.native_acs, s.pipeline.grappa.taps.ky, s.pipeline.grappa.taps.kx, s.pipeline.grappa.lambda_rel,
    t.lr0, t.adam.beta1, t.adam.beta2, t.adam.epsilon, t.batch_size, t.max_epochs, t.patience,
    t.class_weights[0], t.class_weights[1], t.per_sample_norm, s.r_max, s.seeds,
    s.bootstrap, s.bench_slices, s.sample, s.factor);
}

void CmdGenerate(Settings const &s)
{
  auto manifest = make_dataset(s.phantom, s.n_samples, s.split);
  fs::create_directories(s.out / "samples");
  ParallelFor(Index(manifest.samples.size()), s.threads, [&](Index i) {
    auto &entry = manifest.samples[size_t(i)];
    auto const sample = make_sample(s.phantom, entry.id);
    write_ksp(s.out / entry.path, sample.kspace);
  });
  write_manifest(s.out / "manifest.json", manifest, s.seed);
  Log(fmt::format("wrote {} samples to {}", manifest.samples.size(), s.out.string()));
}

void CmdRun(Settings const &s)
{
  auto const raw = RawSample(s);
  Index const h = raw.height();
  auto const full_mask = make_mask(h, 1, 0);
  auto const reference = standard_pipeline(raw, full_mask, s.pipeline.grappa).magnitude;
  auto const pca_reference = Magnitude(ifft2_centered(proposed_pipeline(raw, full_mask)));

  std::string csv = "R,acs,pca_nrmse,grappa_nrmse,pca_seconds,grappa_seconds\n";
  for (Index r : s.r_grid) {
    Index const acs = r == 1 ? 0 : std::max(s.pipeline.native_acs, MinimumAcsLines(r, s.pipeline.grappa.taps));
    if (acs > h) {
      csv += fmt::format("{},{},NA,NA,NA,NA\n", r, acs);
      continue;
    }
    auto const mask = make_mask(h, r, acs);
    std::optional<ComplexTensor> proposed;
    std::optional<StandardResult> standard;
    double const t_pca = Timed([&] { proposed = proposed_pipeline(raw, mask); });
    double const t_grappa = Timed([&] { standard = standard_pipeline(raw, mask, s.pipeline.grappa); });
    double const e_pca = Nrmse(Magnitude(ifft2_centered(*proposed)), pca_reference);
    double const e_grappa = Nrmse(standard->magnitude, reference);
    csv += fmt::format("{},{},{:.9f},{:.9f},{:.6f},{:.6f}\n", r, acs, e_pca, e_grappa, t_pca, t_grappa);
    Log(fmt::format("R={:>2} acs={:>3} nrmse pca={:.4f} grappa={:.4f}", r, acs, e_pca, e_grappa));
  }
  WriteText(s.out / "run.csv", csv);
}

void CmdTrain(Settings const &s)
{
  auto const ds = OpenDataset(s);
  auto const train_ids = ds.manifest.ids(Split::Train);
  auto const val_ids = ds.manifest.ids(Split::Val);
  auto const factors = AugmentFactors(s.r_max);
  auto const loader = [&](Index id) { return ds.load(id); };
  Log(fmt::format("preparing {} training and {} validation samples", train_ids.size(), val_ids.size()));
  KSpaceCache const train_cache(loader, train_ids, ds.labels(train_ids), factors, s.pipeline, ds.manifest.spec, s.threads);
  KSpaceCache const val_cache(loader, val_ids, ds.labels(val_ids), factors, s.pipeline, ds.manifest.spec, s.threads);

  for (Index k = 0; k < s.seeds; k++) {
    std::uint64_t const seed = s.seed + std::uint64_t(k);
    TrainConfig cfg = s.train;
    cfg.seed = seed;
    auto const result = train(
      MakeModel(s.channels, seed),
      TrainingSource(train_cache, s.channels, s.r_max, s.pipeline.kind, seed),
      ValidationSource(val_cache, s.channels, s.r_max, s.pipeline.kind, seed),
      cfg);
    auto const path = CheckpointPath(s, k);
    fs::create_directories(s.out);
    write_checkpoint(path, result.model);
    WriteText(path.string() + ".history.csv", HistoryCsv(result.history));
    Log(fmt::format(
      "seed {}: best epoch {} (stopped at {}), checkpoint {}", seed, result.best_epoch, result.stopped_epoch, path.string()));
  }
}

void CmdEval(Settings const &s)
{
  std::vector<ScoreRow> rows;
  if (!s.scores.empty()) {
    rows = ParseScoreCsv(ReadText(s.scores));
  } else {
    auto const ds = OpenDataset(s);
    auto const model = read_checkpoint(s.checkpoint);
    auto const ids = ds.manifest.ids(Split::Test);
    Log(fmt::format("scoring {} test samples at {} factors", ids.size(), s.r_grid.size()));
    KSpaceCache const cache([&](Index id) { return ds.load(id); }, ids, ds.labels(ids), s.r_grid, s.pipeline, ds.manifest.spec, s.threads);
    std::string scores_csv = ScoreCsvHeader();
    for (Index r : s.r_grid) {
      auto const scores = ScoreAt(model, cache, r, s.pipeline.kind, s.train.batch_size, s.train.per_sample_norm, s.threads);
      for (Index i = 0; i < cache.size(); i++) {
        rows.push_back({s.pipeline.kind, model.channels, r, cache.id(i), scores[size_t(i)], cache.label(i)});
        scores_csv += ScoreCsvRow(rows.back());
      }
    }
    WriteText(s.out / "scores.csv", scores_csv);
  }
  auto const results = EvaluateScores(rows, s.bootstrap, s.seed, s.threads);
  std::string csv = EvalCsvHeader();
  for (auto const &r : results) {
    csv += EvalCsvRow(r);
    Log(fmt::format(
      "{} {} R={:>2}: AUROC {:.3f} [{:.3f}, {:.3f}]  AUPRC {:.3f}",
      ToString(r.pipeline), ToString(r.channels), r.factor, r.report.auroc.point, r.report.auroc.low, r.report.auroc.high,
      r.report.auprc.point));
  }
  WriteText(s.out / "eval.csv", csv);
}

void CmdBench(Settings const &s)
{
  static constexpr char const *kStages[] = {"mask", "pca", "grappa_calibrate", "grappa_reconstruct", "fft", "combine"};
  Index const factor = s.pipeline.native_factor;
  Index const acs = factor == 1 ? 0 : std::max(s.pipeline.native_acs, MinimumAcsLines(factor, s.pipeline.grappa.taps));
  auto const mask = make_mask(s.phantom.matrix, factor, acs);

  std::vector<std::vector<double>> stage(std::size(kStages));
  std::vector<double> proposed_t, standard_t;
  std::string timings = "slice,stage,seconds\n";
  std::string outputs = "slice,proposed_energy,standard_magnitude_sum\n";
  for (Index i = 0; i < s.bench_slices; i++) {
    auto const raw = make_sample(s.phantom, i).kspace;
    std::optional<ComplexTensor> summed, filled, images;
    GrappaKernel kernel;
    std::array<double, std::size(kStages)> t{};
    t[0] = Timed([&] { summed = masked_average_sum(raw, mask); });
    t[1] = Timed([&] { (void)pca_compress(*summed, 1); });
    t[2] = Timed([&] { kernel = calibrate(ExtractAcs(*summed, mask), factor, s.pipeline.grappa.taps, s.pipeline.grappa.lambda_rel); });
    t[3] = Timed([&] { filled = reconstruct(*summed, kernel, mask); });
    t[4] = Timed([&] { images = ifft2_centered(*filled); });
    t[5] = Timed([&] { (void)rss_combine(*images); });
    std::optional<ComplexTensor> proposed;
    std::optional<StandardResult> standard;
    proposed_t.push_back(Timed([&] { proposed = proposed_pipeline(raw, mask); }));
    standard_t.push_back(Timed([&] { standard = standard_pipeline(raw, mask, s.pipeline.grappa); }));
    for (size_t k = 0; k < t.size(); k++) {
      stage[k].push_back(t[k]);
      timings += fmt::format("{},{},{:.6f}\n", i, kStages[k], t[k]);
    }
    timings += fmt::format("{},proposed_total,{:.6f}\n{},standard_total,{:.6f}\n", i, proposed_t.back(), i, standard_t.back());
    double mag_sum = 0.0;
    for (double v : standard->magnitude.data()) {
      mag_sum += v;
    }
    outputs += fmt::format("{},{:.17g},{:.17g}\n", i, proposed->energy(), mag_sum);
  }
  auto const median = [](std::vector<double> v) { return Quantile(v, 0.5); };
  std::string summary = "stage,median_seconds\n";
  for (size_t k = 0; k < stage.size(); k++) {
    summary += fmt::format("{},{:.6f}\n", kStages[k], median(stage[k]));
  }
  double const mp = median(proposed_t), ms = median(standard_t);
  summary += fmt::format("proposed_total,{:.6f}\nstandard_total,{:.6f}\nratio,{:.6f}\n", mp, ms, mp / ms);
  WriteText(s.out / "bench.csv", timings);
  WriteText(s.out / "bench_summary.csv", summary);
  WriteText(s.out / "bench_outputs.csv", outputs);
  Log(fmt::format("median proposed {:.4f} s, standard {:.4f} s, ratio {:.3f}", mp, ms, mp / ms));
}

void CmdPlot(Settings const &s)
{
  auto const raw = RawSample(s);
  Index const h = raw.height();
  auto const full = proposed_pipeline(raw, make_mask(h, 1, 0));
  auto const mask = make_mask(h, s.factor, s.pipeline.acs_lines);
  auto const under = proposed_pipeline(raw, mask);
  fs::create_directories(s.out);
  write_pgm(s.out / "magnitude_full.pgm", Magnitude(ifft2_centered(full)));
  write_pgm(s.out / "kspace_full_log.pgm", LogMagnitude(full));
  write_pgm(s.out / fmt::format("magnitude_R{}.pgm", s.factor), Magnitude(ifft2_centered(under)));
  write_pgm(s.out / fmt::format("kspace_R{}_log.pgm", s.factor), LogMagnitude(under));
  write_pgm(s.out / "magnitude_rss.pgm", rss_combine(ifft2_centered(sum_averages(raw))));

  fs::path const scores = s.scores.empty() ? s.out / "scores.csv" : s.scores;
  if (!fs::exists(scores)) {
    Log("no score file at " + scores.string() + "; skipping curves");
    return;
  }
  auto const rows = ParseScoreCsv(ReadText(scores));
  std::vector<std::tuple<PipelineKind, ChannelSet, Index>> keys;
  for (auto const &r : rows) {
    auto const key = std::make_tuple(r.pipeline, r.channels, r.factor);
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      keys.push_back(key);
    }
  }
  for (auto const &[p, c, f] : keys) {
    std::vector<double> sc;
    std::vector<int> lb;
    for (auto const &r : rows) {
      if (r.pipeline == p && r.channels == c && r.factor == f) {
        sc.push_back(r.score);
        lb.push_back(r.label);
      }
    }
    auto const name = fmt::format("{}_{}_R{}", ToString(p), ToString(c), f);
    std::string roc = "threshold,fpr,tpr\n", pr = "threshold,recall,precision\n";
    for (auto const &pt : roc_curve(sc, lb)) {
      roc += fmt::format("{:.17g},{:.9f},{:.9f}\n", pt.threshold, pt.x, pt.y);
    }
    for (auto const &pt : pr_curve(sc, lb)) {
      pr += fmt::format("{:.17g},{:.9f},{:.9f}\n", pt.threshold, pt.x, pt.y);
    }
    WriteText(s.out / ("roc_" + name + ".csv"), roc);
    WriteText(s.out / ("pr_" + name + ".csv"), pr);
  }
}

int RunCli(int argc, char **argv)
{
  CLI::App app{"Synthetic k-space classification toolkit"};
  app.require_subcommand(1);
  std::string config_path;
  CliOverrides flags;
  auto const add_flags = [&](CLI::App *cmd) {
    cmd->add_option("--config", config_path, "key = value configuration file");
    cmd->add_option("--seed", flags.seed, "global seed");
    cmd->add_option("--out", flags.out, "output directory");
    cmd->add_option("--r-grid", flags.r_grid, "comma-separated undersampling factors");
    cmd->add_option("--channels", flags.channels, "mag | mag+phase | mag+k");
    cmd->add_option("--pipeline", flags.pipeline, "pca | grappa");
    cmd->add_option("--threads", flags.threads, "worker threads");
  };
  std::vector<std::pair<CLI::App *, void (*)(Settings const &)>> commands{
    {app.add_subcommand("generate", "write a seeded phantom dataset"), CmdGenerate},
    {app.add_subcommand("run", "compare pipelines on one sample across the R grid"), CmdRun},
    {app.add_subcommand("train", "train classifiers on a dataset"), CmdTrain},
    {app.add_subcommand("eval", "score the test split and report AUROC/AUPRC with bootstrap intervals"), CmdEval},
    {app.add_subcommand("bench", "per-stage pipeline timings"), CmdBench},
    {app.add_subcommand("plot", "grayscale images and metric curves"), CmdPlot},
  };
  for (auto &[cmd, fn] : commands) {
    add_flags(cmd);
  }
  auto *defaults = app.add_subcommand("defaults", "print the default configuration");

  try {
    app.parse(argc, argv);
  } catch (CLI::ParseError const &e) {
    int const code = app.exit(e);
    return code == 0 ? 0 : ExitCode(ErrorKind::Config);
  }

  try {
    if (defaults->parsed()) {
      fmt::print("{}", DefaultConfigText());
      return 0;
    }
    Config const cfg = config_path.empty() ? Config{} : Config::Load(config_path);
    Settings const settings = ResolveSettings(cfg, flags);
    for (auto &[cmd, fn] : commands) {
      if (cmd->parsed()) {
        fn(settings);
      }
    }
    return 0;
  } catch (Error const &e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return ExitCode(e.kind());
  } catch (fs::filesystem_error const &e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return ExitCode(ErrorKind::Data);
  } catch (std::exception const &e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return ExitCode(ErrorKind::Numeric);
  }
}

} // namespace kspnet
