#include <doctest.h>

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "pairbench/rng.hpp"

using namespace pairbench;

TEST_CASE("splitmix64 matches the reference sequence") {
  // reference vectors: successive outputs of the splitmix64 reference
  // implementation starting from state 0
  CHECK(splitmix64(0) == 0xE220A8397B1DCDAFull);
  CHECK(splitmix64(kGolden64) == 0x6E789E6AA1B965F4ull);
  CHECK(splitmix64(2 * kGolden64) == 0x06C45D188009454Full);
}

TEST_CASE("resample stream seeds are splitmix64 of an affine index map") {
  CHECK(resample_stream_seed(7, 0) == splitmix64(7 + kGolden64));
  CHECK(resample_stream_seed(7, 3) == splitmix64(7 + 4 * kGolden64));
  CHECK(resample_stream_seed(0, 0) != resample_stream_seed(0, 1));
  CHECK(resample_stream_seed(0, 1) != resample_stream_seed(1, 0));
}

TEST_CASE("rng is deterministic for a fixed seed") {
  Rng a(123), b(123);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
}

TEST_CASE("bounded draws stay in range and reach every value") {
  Rng rng(1);
  std::map<std::uint64_t, int> histogram;
  for (int i = 0; i < 6000; ++i) {
    std::uint64_t draw = rng.bounded(6);
    REQUIRE(draw < 6);
    ++histogram[draw];
  }
  for (std::uint64_t v = 0; v < 6; ++v) {
    REQUIRE(histogram.count(v) == 1);
    // loose uniformity: each face within 25% of the expected 1000
    CHECK(histogram[v] > 750);
    CHECK(histogram[v] < 1250);
  }
  CHECK_THROWS_AS(rng.bounded(0), std::invalid_argument);
}

TEST_CASE("bounded(1) is always zero and consumes the stream deterministically") {
  Rng rng(9);
  for (int i = 0; i < 10; ++i) CHECK(rng.bounded(1) == 0);
}

TEST_CASE("percentile is linear interpolation at h = (N-1)q") {
  std::vector<double> v{1, 2, 3, 4};
  CHECK(percentile(v, 0.5) == doctest::Approx(2.5));
  CHECK(percentile(v, 0.0) == 1.0);
  CHECK(percentile(v, 1.0) == 4.0);
  CHECK(percentile(v, 0.25) == doctest::Approx(1.75));
  std::vector<double> odd{5, 1, 3};  // unsorted on purpose
  CHECK(percentile(odd, 0.5) == 3.0);
  std::vector<double> two{0, 10};
  CHECK(percentile(two, 0.25) == doctest::Approx(2.5));
  CHECK(percentile(two, 0.975) == doctest::Approx(9.75));
  std::vector<double> one{42};
  CHECK(percentile(one, 0.3) == 42.0);
  CHECK_THROWS_AS(percentile({}, 0.5), std::invalid_argument);
}

TEST_CASE("percentile_sorted requires no copy and matches percentile") {
  std::vector<double> sorted{0.0, 0.25, 0.5, 0.75, 1.0};
  CHECK(percentile_sorted(sorted, 0.625) == doctest::Approx(0.625));
  CHECK(percentile_sorted(sorted, 0.025) == doctest::Approx(0.025));
  CHECK(percentile_sorted(sorted, 0.975) == doctest::Approx(0.975));
}
