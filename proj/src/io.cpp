#include "kspnet/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <limits>

namespace kspnet {

static_assert(std::endian::native == std::endian::little, "file formats assume a little-endian host");

namespace {

constexpr char kKspMagic[4] = {'K', 'S', 'P', '1'};
constexpr char kWeightMagic[4] = {'K', 'S', 'P', 'W'};
constexpr std::uint32_t kCheckpointVersion = 1;
constexpr std::size_t kKspHeader = 4 + 4 * 4 + 1;

class Writer
{
public:
  explicit Writer(std::filesystem::path const &path)
    : path_(path)
    , out_(path, std::ios::binary | std::ios::trunc)
  {
    if (!out_) {
      throw IoError(IoErrc::OpenFailed, "cannot open '" + path.string() + "' for writing");
    }
  }

  void bytes(void const *p, std::size_t n) { out_.write(static_cast<char const *>(p), std::streamsize(n)); }
  void u32(std::uint32_t v) { bytes(&v, 4); }
  void u8(std::uint8_t v) { bytes(&v, 1); }
  void f32(float v) { bytes(&v, 4); }

  void finish()
  {
    out_.flush();
    if (!out_) {
      throw IoError(IoErrc::WriteFailed, "failed writing '" + path_.string() + "'");
    }
  }

private:
  std::filesystem::path path_;
  std::ofstream out_;
};

std::vector<char> Slurp(std::filesystem::path const &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError(IoErrc::OpenFailed, "cannot open '" + path.string() + "'");
  }
  return std::vector<char>(std::istreambuf_iterator<char>(in), {});
}

class Reader
{
public:
  Reader(std::vector<char> data, std::string name)
    : data_(std::move(data))
    , name_(std::move(name))
  {
  }

  std::size_t remaining() const { return data_.size() - pos_; }

  void bytes(void *p, std::size_t n, IoErrc code)
  {
    if (remaining() < n) {
      throw IoError(code, "'" + name_ + "' ends early");
    }
    std::memcpy(p, data_.data() + pos_, n);
    pos_ += n;
  }
  std::uint32_t u32(IoErrc code)
  {
    std::uint32_t v;
    bytes(&v, 4, code);
    return v;
  }

private:
  std::vector<char> data_;
  std::string name_;
  std::size_t pos_ = 0;
};

} // namespace

void write_ksp(std::filesystem::path const &path, ComplexTensor const &t)
{
  Writer w(path);
  w.bytes(kKspMagic, 4);
  auto const &d = t.dims();
  for (Index v : {d.avg, d.coil, d.height, d.width}) {
    if (v > Index(std::numeric_limits<std::uint32_t>::max())) {
      throw IoError(IoErrc::DimOverflow, "dimension too large for the KSP1 format");
    }
    w.u32(std::uint32_t(v));
  }
  w.u8(std::uint8_t(t.domain()));
  std::vector<float> payload;
  payload.reserve(t.data().size() * 2);
  for (auto const &z : t.data()) {
    payload.push_back(float(z.real()));
    payload.push_back(float(z.imag()));
  }
  w.bytes(payload.data(), payload.size() * sizeof(float));
  w.finish();
}

ComplexTensor read_ksp(std::filesystem::path const &path)
{
  Reader r(Slurp(path), path.string());
  char magic[4];
  r.bytes(magic, 4, IoErrc::BadMagic);
  if (std::memcmp(magic, kKspMagic, 4) != 0) {
    throw IoError(IoErrc::BadMagic, "'" + path.string() + "': bad magic, not a KSP1 file");
  }
  std::uint32_t dims[4];
  for (auto &v : dims) {
    v = r.u32(IoErrc::TruncatedHeader);
  }
  std::uint8_t tag;
  r.bytes(&tag, 1, IoErrc::TruncatedHeader);
  if (tag > 1) {
    throw IoError(IoErrc::BadDomain, "'" + path.string() + "': unknown domain tag " + std::to_string(tag));
  }
  // Sample count and byte size must fit comfortably in 64 bits and in memory.
  unsigned __int128 count = 1;
  for (auto v : dims) {
    count *= v;
  }
  if (count == 0 || count > (unsigned __int128)(1) << 36) {
    throw IoError(IoErrc::DimOverflow, "'" + path.string() + "': dimensions overflow or are empty");
  }
  std::size_t const expected = std::size_t(count) * 8;
  if (r.remaining() != expected) {
    throw IoError(
      IoErrc::TruncatedPayload,
      "'" + path.string() + "': truncated payload, expected " + std::to_string(expected) + " bytes, got " +
        std::to_string(r.remaining()));
  }
  std::vector<float> payload(std::size_t(count) * 2);
  r.bytes(payload.data(), expected, IoErrc::TruncatedPayload);
  std::vector<Cx> data(static_cast<std::size_t>(count));
  for (std::size_t i = 0; i < data.size(); i++) {
    data[i] = Cx(payload[2 * i], payload[2 * i + 1]);
  }
  return ComplexTensor({Index(dims[0]), Index(dims[1]), Index(dims[2]), Index(dims[3])}, Domain(tag), std::move(data));
}

void write_checkpoint(std::filesystem::path const &path, Model const &model)
{
  Writer w(path);
  w.bytes(kWeightMagic, 4);
  w.u32(kCheckpointVersion);
  w.u32(std::uint32_t(model.channels));
  w.u32(std::uint32_t(model.branches.size()));
  for (size_t b = 0; b < model.branches.size(); b++) {
    auto const &net = model.branches[b];
    auto const blocks = net.blocks();
    w.u32(std::uint32_t(net.in_channels()));
    w.u32(std::uint32_t(blocks.size()));
    for (auto const &blk : blocks) {
      std::string const name = "branch" + std::to_string(b) + "." + blk.name;
      w.u32(std::uint32_t(name.size()));
      w.bytes(name.data(), name.size());
      w.u32(std::uint32_t(blk.size));
      for (Index i = 0; i < blk.size; i++) {
        w.f32(float(net.params()[size_t(blk.offset + i)]));
      }
    }
  }
  w.finish();
}

Model read_checkpoint(std::filesystem::path const &path)
{
  Reader r(Slurp(path), path.string());
  char magic[4];
  r.bytes(magic, 4, IoErrc::BadMagic);
  if (std::memcmp(magic, kWeightMagic, 4) != 0) {
    throw IoError(IoErrc::BadMagic, "'" + path.string() + "': bad magic, not a weight checkpoint");
  }
  if (r.u32(IoErrc::TruncatedHeader) != kCheckpointVersion) {
    throw IoError(IoErrc::BadVersion, "'" + path.string() + "': unsupported checkpoint version");
  }
  std::uint32_t const set = r.u32(IoErrc::TruncatedHeader);
  std::uint32_t const n_branches = r.u32(IoErrc::TruncatedHeader);
  if (set > 2 || n_branches < 1 || n_branches > 2) {
    throw IoError(IoErrc::BadManifest, "'" + path.string() + "': invalid model layout");
  }
  Model model{ChannelSet(set), {}};
  for (std::uint32_t b = 0; b < n_branches; b++) {
    std::uint32_t const in = r.u32(IoErrc::TruncatedHeader);
    if (in < 1 || in > 4) {
      throw IoError(IoErrc::BadManifest, "'" + path.string() + "': invalid input channel count");
    }
    Classifier net{Index(in)};
    auto const blocks = net.blocks();
    if (r.u32(IoErrc::TruncatedHeader) != blocks.size()) {
      throw IoError(IoErrc::BadManifest, "'" + path.string() + "': unexpected block count");
    }
    for (auto const &blk : blocks) {
      std::uint32_t const len = r.u32(IoErrc::TruncatedPayload);
      if (len > 256) {
        throw IoError(IoErrc::BadManifest, "'" + path.string() + "': block name too long");
      }
      std::string name(len, '\0');
      r.bytes(name.data(), len, IoErrc::TruncatedPayload);
      std::string const want = "branch" + std::to_string(b) + "." + blk.name;
      if (name != want || r.u32(IoErrc::TruncatedPayload) != std::uint32_t(blk.size)) {
        throw IoError(IoErrc::BadManifest, "'" + path.string() + "': expected block " + want + ", found " + name);
      }
      for (Index i = 0; i < blk.size; i++) {
        float v;
        r.bytes(&v, 4, IoErrc::TruncatedPayload);
        net.params()[size_t(blk.offset + i)] = double(v);
      }
    }
    model.branches.push_back(std::move(net));
  }
  return model;
}

namespace {
nlohmann::json SpecToJson(PhantomSpec const &s)
{
  return {
    {"matrix", s.matrix},
    {"n_coil", s.n_coil},
    {"n_avg", s.n_avg},
    {"noise_sigma", s.noise_sigma},
    {"lesion_prob", s.lesion_prob},
    {"lesion_radius_min", s.lesion_radius_min},
    {"lesion_radius_max", s.lesion_radius_max},
    {"lesion_contrast_min", s.lesion_contrast_min},
    {"lesion_contrast_max", s.lesion_contrast_max},
    {"lesion_phase_min", s.lesion_phase_min},
    {"lesion_phase_max", s.lesion_phase_max},
    {"phase_strength", s.phase_strength},
    {"snr_scaling", s.snr_scaling},
    {"seed", s.seed}};
}

PhantomSpec SpecFromJson(nlohmann::json const &j)
{
  PhantomSpec s;
  s.matrix = j.at("matrix").get<Index>();
  s.n_coil = j.at("n_coil").get<Index>();
  s.n_avg = j.at("n_avg").get<Index>();
  s.noise_sigma = j.at("noise_sigma").get<double>();
  s.lesion_prob = j.at("lesion_prob").get<double>();
  s.lesion_radius_min = j.at("lesion_radius_min").get<double>();
  s.lesion_radius_max = j.at("lesion_radius_max").get<double>();
  s.lesion_contrast_min = j.at("lesion_contrast_min").get<double>();
  s.lesion_contrast_max = j.at("lesion_contrast_max").get<double>();
  s.lesion_phase_min = j.at("lesion_phase_min").get<double>();
  s.lesion_phase_max = j.at("lesion_phase_max").get<double>();
  s.phase_strength = j.at("phase_strength").get<double>();
  s.snr_scaling = j.at("snr_scaling").get<bool>();
  s.seed = j.at("seed").get<std::uint64_t>();
  return s;
}
} // namespace

void write_manifest(std::filesystem::path const &path, DatasetManifest const &m, std::uint64_t global_seed)
{
  nlohmann::json j;
  j["format_version"] = m.format_version;
  j["seed"] = global_seed;
  j["phantom"] = SpecToJson(m.spec);
  auto &samples = j["samples"] = nlohmann::json::array();
  for (auto const &e : m.samples) {
    samples.push_back({{"id", e.id}, {"path", e.path}, {"label", e.label}, {"split", ToString(e.split)}});
  }
  std::ofstream out(path);
  out << j.dump(2) << "\n";
  if (!out) {
    throw IoError(IoErrc::WriteFailed, "failed writing '" + path.string() + "'");
  }
}

DatasetManifest read_manifest(std::filesystem::path const &path)
{
  std::ifstream in(path);
  if (!in) {
    throw IoError(IoErrc::OpenFailed, "cannot open manifest '" + path.string() + "'");
  }
  try {
    auto const j = nlohmann::json::parse(in);
    DatasetManifest m;
    m.format_version = j.at("format_version").get<int>();
    if (m.format_version != 1) {
      throw IoError(IoErrc::BadVersion, "unsupported manifest version " + std::to_string(m.format_version));
    }
    m.spec = SpecFromJson(j.at("phantom"));
    std::vector<Index> seen;
    for (auto const &e : j.at("samples")) {
      SampleEntry s{e.at("id").get<Index>(), e.at("label").get<int>(), ParseSplit(e.at("split").get<std::string>()), e.at("path").get<std::string>()};
      seen.push_back(s.id);
      m.samples.push_back(std::move(s));
    }
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
      throw IoError(IoErrc::BadManifest, "manifest '" + path.string() + "' repeats a sample id");
    }
    for (auto const &e : m.samples) {
      if (!std::filesystem::exists(path.parent_path() / e.path)) {
        throw IoError(IoErrc::BadManifest, "manifest '" + path.string() + "' lists missing file '" + e.path + "'");
      }
    }
    return m;
  } catch (nlohmann::json::exception const &e) {
    throw IoError(IoErrc::BadManifest, "malformed manifest '" + path.string() + "': " + e.what());
  }
}

void write_pgm(std::filesystem::path const &path, RealPlane const &plane)
{
  auto const data = plane.data();
  auto const [lo, hi] = std::minmax_element(data.begin(), data.end());
  double const range = *hi - *lo;
  Writer w(path);
  std::string const header = "P5\n" + std::to_string(plane.width()) + " " + std::to_string(plane.height()) + "\n255\n";
  w.bytes(header.data(), header.size());
  std::vector<std::uint8_t> px(data.size());
  for (size_t i = 0; i < data.size(); i++) {
    double const v = range > 0.0 ? (data[i] - *lo) / range : 0.0;
    px[i] = std::uint8_t(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
  }
  w.bytes(px.data(), px.size());
  w.finish();
}

} // namespace kspnet
