#include "kspnet/ctensor.hpp"
#include "kspnet/error.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

namespace kspnet {

namespace {

// FFTW plans are created under a lock and reused; fftw_execute_dft is
// thread-safe on distinct buffers.
class PlanCache
{
public:
  ~PlanCache()
  {
    for (auto &[key, plan] : plans_) {
      fftw_destroy_plan(plan);
    }
  }

  fftw_plan get(Index h, Index w, int sign)
  {
    std::lock_guard lock(mutex_);
    auto const key = std::make_tuple(h, w, sign);
    if (auto it = plans_.find(key); it != plans_.end()) {
      return it->second;
    }
    auto *scratch = fftw_alloc_complex(size_t(h * w));
    fftw_plan p = fftw_plan_dft_2d(int(h), int(w), scratch, scratch, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(scratch);
    if (!p) {
      throw Error(ErrorKind::Numeric, "FFTW could not create a plan");
    }
    plans_.emplace(key, p);
    return p;
  }

private:
  std::mutex mutex_;
  std::map<std::tuple<Index, Index, int>, fftw_plan> plans_;
};

PlanCache &Plans()
{
  static PlanCache cache;
  return cache;
}

} // namespace

void fft2_centered_plane(std::span<Cx> plane, Index h, Index w, bool inverse)
{
  // Centered DFT = fftshift(DFT(ifftshift(x))). ifftshift moves index h/2 to 0.
  Index const ch = h / 2, cw = w / 2;
  std::vector<Cx> buf(size_t(h * w));
  for (Index y = 0; y < h; y++) {
    Index const sy = (y + ch) % h;
    for (Index x = 0; x < w; x++) {
      buf[size_t(y * w + x)] = plane[size_t(sy * w + (x + cw) % w)];
    }
  }
  auto *raw = reinterpret_cast<fftw_complex *>(buf.data());
  fftw_execute_dft(Plans().get(h, w, inverse ? FFTW_BACKWARD : FFTW_FORWARD), raw, raw);
  double const scale = 1.0 / std::sqrt(double(h * w));
  for (Index y = 0; y < h; y++) {
    Index const sy = (y + ch) % h;
    for (Index x = 0; x < w; x++) {
      plane[size_t(sy * w + (x + cw) % w)] = buf[size_t(y * w + x)] * scale;
    }
  }
}

namespace {
ComplexTensor Transform(ComplexTensor const &in, bool inverse)
{
  ComplexTensor out = in;
  for (Index a = 0; a < in.n_avg(); a++) {
    for (Index c = 0; c < in.n_coil(); c++) {
      fft2_centered_plane(out.plane(a, c), in.height(), in.width(), inverse);
    }
  }
  return out;
}
} // namespace

ComplexTensor ifft2_centered(ComplexTensor const &k)
{
  if (k.domain() != Domain::KSpace) {
    throw Error(ErrorKind::Domain, "ifft2_centered expects k-space data");
  }
  ComplexTensor out = Transform(k, true);
  out.domain_ = Domain::Image;
  return out;
}

ComplexTensor fft2_centered(ComplexTensor const &img)
{
  if (img.domain() != Domain::Image) {
    throw Error(ErrorKind::Domain, "fft2_centered expects image data");
  }
  ComplexTensor out = Transform(img, false);
  out.domain_ = Domain::KSpace;
  return out;
}

} // namespace kspnet
