#include "support.hpp"

#include "kspnet/ctensor.hpp"
#include "kspnet/error.hpp"

#include <doctest.h>

using namespace kspnet;
using namespace kspnet::testing;

TEST_CASE("centered transforms agree with the direct DFT")
{
  for (Index n : {4, 8, 13, 16}) {
    for (Index w : {n, Index(6)}) {
      auto const x = RandomTensor({1, 1, n, w}, Domain::Image, std::uint64_t(n * 100 + w));
      auto const k = fft2_centered(x);
      CHECK(k.domain() == Domain::KSpace);
      CHECK(MaxAbsDiff(k.plane(0, 0), DirectDft(x.plane(0, 0), n, w, false)) < 1e-10);
      auto const kk = RandomTensor({1, 1, n, w}, Domain::KSpace, std::uint64_t(n + w));
      CHECK(MaxAbsDiff(ifft2_centered(kk).plane(0, 0), DirectDft(kk.plane(0, 0), n, w, true)) < 1e-10);
    }
  }
}

TEST_CASE("round trip and unitarity")
{
  auto const x = RandomTensor({2, 3, 100, 100}, Domain::Image, 7);
  auto const k = fft2_centered(x);
  CHECK(std::abs(k.energy() - x.energy()) < 1e-9 * x.energy());
  auto const back = ifft2_centered(k);
  CHECK(back.domain() == Domain::Image);
  CHECK(MaxAbsDiff(back.data(), x.data()) < 1e-12);
}

TEST_CASE("DC sits at the center")
{
  ComplexTensor img({1, 1, 9, 6}, Domain::Image);
  for (auto &z : img.data()) {
    z = 1.0;
  }
  auto const k = fft2_centered(img);
  CHECK(std::abs(k(0, 0, 4, 3) - std::sqrt(54.0)) < 1e-12);
  double rest = k.energy() - std::norm(k(0, 0, 4, 3));
  CHECK(rest < 1e-20);
}

TEST_CASE("transforms check the domain tag")
{
  ComplexTensor k({1, 1, 4, 4}, Domain::KSpace);
  CHECK_THROWS_AS(fft2_centered(k), Error);
  try {
    (void)fft2_centered(k);
  } catch (Error const &e) {
    CHECK(e.kind() == ErrorKind::Domain);
  }
  CHECK_THROWS_AS(ifft2_centered(ifft2_centered(k)), Error);
}

TEST_CASE("construction validates sizes")
{
  CHECK_THROWS_AS(ComplexTensor({1, 1, 1, 4}, Domain::Image), Error);
  CHECK_THROWS_AS(ComplexTensor({1, 1, 4, 4}, Domain::Image, std::vector<Cx>(3)), Error);
  ComplexTensor t({2, 3, 4, 5}, Domain::Image);
  CHECK(t.data().size() == 120);
  t(1, 2, 3, 4) = Cx(1, 2);
  CHECK(t.plane(1, 2)[19] == Cx(1, 2));
}

TEST_CASE("sum over averages")
{
  auto const x = RandomTensor({3, 2, 4, 4}, Domain::KSpace, 3);
  auto const s = sum_averages(x);
  CHECK(s.n_avg() == 1);
  CHECK(s.domain() == Domain::KSpace);
  CHECK(std::abs(s(0, 1, 2, 3) - (x(0, 1, 2, 3) + x(1, 1, 2, 3) + x(2, 1, 2, 3))) < 1e-14);
}

TEST_CASE("channel splits invert")
{
  auto const img = RandomTensor({1, 2, 6, 5}, Domain::Image, 11);
  auto const [mag, phase] = split_image_channels(img, 1);
  auto const polar = combine_polar(mag, phase);
  CHECK(polar.domain() == Domain::Image);
  for (Index y = 0; y < 6; y++) {
    for (Index x = 0; x < 5; x++) {
      CHECK(std::abs(polar(0, 0, y, x) - img(0, 1, y, x)) < 1e-12);
      CHECK(phase(y, x) >= -std::numbers::pi);
      CHECK(phase(y, x) <= std::numbers::pi);
    }
  }
  auto const k = RandomTensor({1, 1, 4, 4}, Domain::KSpace, 12);
  auto const [re, im] = split_kspace_channels(k, 0);
  CHECK(combine_cartesian(re, im) == k);
  CHECK_THROWS_AS(split_image_channels(k, 0), Error);
  CHECK_THROWS_AS(split_kspace_channels(img, 0), Error);
}

TEST_CASE("phase conventions")
{
  CHECK(Phase(Cx(0, 0)) == 0.0);
  CHECK(Phase(Cx(-1, 0)) == doctest::Approx(std::numbers::pi));
  CHECK(Phase(Cx(-1, -0.0)) == doctest::Approx(std::numbers::pi));
  CHECK(Phase(Cx(0, 1)) == doctest::Approx(std::numbers::pi / 2));
}
