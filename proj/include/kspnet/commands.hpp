#pragma once

#include "config.hpp"
#include "experiment.hpp"

#include <filesystem>
#include <optional>

namespace kspnet {

/// Flag overrides; a set flag wins over the config file.
struct CliOverrides
{
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> r_grid;
  std::optional<std::string> channels;
  std::optional<std::string> pipeline;
  std::optional<int> threads;
};

/// Fully resolved experiment settings shared by all commands.
struct Settings
{
  std::uint64_t seed = 0;
  int threads = 1;
  std::filesystem::path out = "out";

  PhantomSpec phantom;
  Index n_samples = 360;
  SplitFractions split;
  std::filesystem::path data; // dataset directory (manifest.json + samples/)

  PipelineSettings pipeline;
  ChannelSet channels = ChannelSet::Mag;
  std::vector<Index> r_grid{1, 2, 4, 8, 16, 24, 32, 48, 64};

  TrainConfig train;
  Index r_max = 8;
  Index seeds = 1;

  Index bootstrap = 1000;
  std::filesystem::path checkpoint; // default: <out>/model.kspw
  std::filesystem::path scores;     // eval from a score CSV instead of a model

  Index bench_slices = 50;
  Index sample = 0; // run / plot
  Index factor = 4; // plot
};

/// Binds every known key; throws a Config error listing all offending keys.
Settings ResolveSettings(Config cfg, CliOverrides const &flags);

/// Keys accepted in config files, with their defaults, one `key = value` per line.
std::string DefaultConfigText();

void CmdGenerate(Settings const &s);
void CmdRun(Settings const &s);
void CmdTrain(Settings const &s);
void CmdEval(Settings const &s);
void CmdBench(Settings const &s);
void CmdPlot(Settings const &s);

/// Parses argv, runs the subcommand and maps errors to exit codes.
int RunCli(int argc, char **argv);

} // namespace kspnet
