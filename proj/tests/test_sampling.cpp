#include "support.hpp"

#include "kspnet/error.hpp"
#include "kspnet/sampling.hpp"

#include <doctest.h>

#include <map>

using namespace kspnet;
using namespace kspnet::testing;

TEST_CASE("mask keeps the comb and the ACS block")
{
  auto const m = make_mask(100, 4, 24);
  CHECK(m.acs_begin() == 38);
  CHECK(m.acs_end() == 62);
  for (Index y = 0; y < 100; y++) {
    bool const expect = y % 4 == 0 || (y >= 38 && y < 62);
    CHECK(m.keep[size_t(y)] == expect);
  }
  CHECK(m.kept() == 25 + 24 - 6);
  auto const full = make_mask(13, 1, 0);
  CHECK(full.kept() == 13);
  auto const odd = make_mask(13, 3, 4);
  CHECK(odd.acs_begin() == 5);
}

TEST_CASE("mask arguments are validated")
{
  CHECK_THROWS_AS(make_mask(10, 0, 0), Error);
  CHECK_THROWS_AS(make_mask(10, 11, 0), Error);
  CHECK_THROWS_AS(make_mask(10, 2, 11), Error);
  CHECK_THROWS_AS(make_mask(10, 2, -1), Error);
}

TEST_CASE("apply_mask zeroes dropped rows only")
{
  auto const k = RandomTensor({2, 3, 16, 8}, Domain::KSpace, 5);
  auto const m = make_mask(16, 4, 4);
  auto const u = apply_mask(k, m);
  for (Index a = 0; a < 2; a++) {
    for (Index c = 0; c < 3; c++) {
      for (Index y = 0; y < 16; y++) {
        for (Index x = 0; x < 8; x++) {
          CHECK(u(a, c, y, x) == (m.keep[size_t(y)] ? k(a, c, y, x) : Cx{}));
        }
      }
    }
  }
  CHECK(apply_mask(u, m) == u);
  CHECK_THROWS_AS(apply_mask(k, make_mask(15, 2, 0)), Error);
  CHECK_THROWS_AS(apply_mask(ifft2_centered(k), m), Error);
}

TEST_CASE("augmentation factors are powers of two")
{
  CHECK(AugmentFactors(1) == std::vector<Index>{1});
  CHECK(AugmentFactors(8) == std::vector<Index>{1, 2, 4, 8});
  CHECK(AugmentFactors(12) == std::vector<Index>{1, 2, 4, 8});
  CHECK_THROWS_AS(AugmentFactors(0), Error);
}

TEST_CASE("factor draws are uniform over the augmentation set")
{
  Rng rng(1);
  std::map<Index, int> counts;
  int const n = 40000;
  for (int i = 0; i < n; i++) {
    counts[DrawFactor(8, rng)]++;
  }
  CHECK(counts.size() == 4);
  for (auto const &[r, c] : counts) {
    CHECK(std::abs(double(c) / n - 0.25) < 0.01);
  }
}

TEST_CASE("undersample_augment is reproducible from its seed")
{
  auto const k = RandomTensor({1, 2, 32, 8}, Domain::KSpace, 9);
  auto const a = undersample_augment(k, 8, 6, 42);
  auto const b = undersample_augment(k, 8, 6, 42);
  CHECK(a.kspace == b.kspace);
  CHECK(a.mask == b.mask);
  CHECK(a.kspace == apply_mask(k, a.mask));
}
