#pragma once

#include "ctensor.hpp"
#include "error.hpp"
#include "metrics.hpp"
#include "model.hpp"
#include "phantom.hpp"

#include <filesystem>
#include <string>

namespace kspnet {

enum class IoErrc
{
  OpenFailed,
  WriteFailed,
  BadMagic,
  TruncatedHeader,
  TruncatedPayload,
  DimOverflow,
  BadDomain,
  BadVersion,
  BadManifest
};

class IoError : public Error
{
public:
  IoError(IoErrc code, std::string const &what)
    : Error(ErrorKind::Data, what)
    , code_(code)
  {
  }
  IoErrc code() const { return code_; }

private:
  IoErrc code_;
};

// KSP1 container: "KSP1", u32 LE dims [avg, coil, height, width], u8 domain tag,
// then interleaved (re, im) float32 LE samples in row-major order.
void write_ksp(std::filesystem::path const &path, ComplexTensor const &t);
ComplexTensor read_ksp(std::filesystem::path const &path);

// Weight checkpoint: "KSPW", u32 version, u32 channel set, u32 branch count, then
// per branch u32 input channels, u32 block count and blocks of
// (u32 name length, name, u32 value count, float32 LE values).
void write_checkpoint(std::filesystem::path const &path, Model const &model);
Model read_checkpoint(std::filesystem::path const &path);

// JSON manifest next to the sample files.
void write_manifest(std::filesystem::path const &path, DatasetManifest const &m, std::uint64_t global_seed);
DatasetManifest read_manifest(std::filesystem::path const &path);

/// 8-bit binary PGM, linearly scaled from [min, max] of the plane.
void write_pgm(std::filesystem::path const &path, RealPlane const &plane);

} // namespace kspnet
