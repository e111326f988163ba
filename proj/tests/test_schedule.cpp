#include "physica/schedule.hpp"

#include "physica/errors.hpp"
#include "physica/rng.hpp"
#include "reference.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace physica;
using namespace physica::testing;

TEST_CASE("single-step schedule is a single product term") {
  const NoiseSchedule sched = linear_schedule(1, 0.1, 0.1);
  REQUIRE(sched.steps() == 1);
  CHECK(sched.alpha_bar(1) == doctest::Approx(0.9).epsilon(1e-15));
}

TEST_CASE("constant beta gives the closed form (1 - beta)^t") {
  const double beta = 0.007;
  const NoiseSchedule sched = linear_schedule(50, beta, beta);
  for (int t = 1; t <= 50; ++t)
    CHECK(std::abs(sched.alpha_bar(t) - std::pow(1.0 - beta, t)) < 1e-12);
}

TEST_CASE("default 1000-step schedule matches the cumulative-product oracle") {
  const NoiseSchedule sched = linear_schedule(1000, 1e-4, 2e-2);
  REQUIRE(sched.betas.front() == 1e-4);
  REQUIRE(sched.betas.back() == 2e-2);
  const auto expected = cumprod_alpha_bars(sched.betas);
  for (int t = 1; t <= 1000; ++t)
    CHECK(std::abs(sched.alpha_bar(t) - expected[static_cast<std::size_t>(t - 1)]) < 1e-12);
}

TEST_CASE("alpha_bars decrease strictly and satisfy the recurrence") {
  SplitMix64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const double b0 = rng.uniform(1e-6, 0.4);
    const double b1 = rng.uniform(b0, 0.9);
    const int steps = static_cast<int>(2 + rng.next_below(200));
    const NoiseSchedule sched = linear_schedule(steps, b0, b1);
    for (int t = 2; t <= steps; ++t) {
      CHECK(sched.alpha_bar(t) < sched.alpha_bar(t - 1));
      CHECK(sched.alpha_bar(t) ==
            sched.alpha_bar(t - 1) * (1.0 - sched.beta(t)));  // exact by construction
    }
    CHECK(sched.alpha_bar(1) > 0.0);
    CHECK(sched.alpha_bar(steps) < 1.0);
  }
}

TEST_CASE("schedule rejects invalid ranges") {
  CHECK_THROWS_AS(linear_schedule(0, 0.1, 0.2), InvalidRange);
  CHECK_THROWS_AS(linear_schedule(10, 0.0, 0.2), InvalidRange);
  CHECK_THROWS_AS(linear_schedule(10, 0.3, 0.2), InvalidRange);
  CHECK_THROWS_AS(linear_schedule(10, 0.1, 1.0), InvalidRange);
}

TEST_CASE("add_noise reduces to z0 as beta vanishes") {
  const NoiseSchedule sched = linear_schedule(1, 1e-12, 1e-12);
  std::vector<double> z0{1.0, -2.0, 0.5};
  std::vector<double> eps{0.3, 0.3, 0.3};
  const auto out = add_noise(z0, 1, eps, sched);
  for (std::size_t i = 0; i < z0.size(); ++i) CHECK(std::abs(out[i] - z0[i]) < 1e-5);
}

TEST_CASE("zero noise scales the signal by sqrt(alpha_bar)") {
  const NoiseSchedule sched = linear_schedule(100, 1e-4, 2e-2);
  std::vector<double> z0{2.0, -4.0};
  std::vector<double> eps{0.0, 0.0};
  const auto out = add_noise(z0, 40, eps, sched);
  const double s = std::sqrt(sched.alpha_bar(40));
  CHECK(out[0] == s * 2.0);
  CHECK(out[1] == s * -4.0);
}

TEST_CASE("add_noise preserves unit variance within 2 percent") {
  const NoiseSchedule sched = linear_schedule(1000, 1e-4, 2e-2);
  SplitMix64 rng(123);
  const std::size_t n = 1'000'000;
  std::vector<double> z0(n), eps(n);
  for (std::size_t i = 0; i < n; ++i) {
    z0[i] = rng.normal();
    eps[i] = rng.normal();
  }
  const auto z_t = add_noise(z0, 500, eps, sched);
  double mean = 0.0;
  for (double v : z_t) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : z_t) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n - 1);
  CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("add_noise is linear in (z0, eps)") {
  const NoiseSchedule sched = linear_schedule(200, 1e-4, 2e-2);
  SplitMix64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const double a = rng.uniform(-3, 3);
    std::vector<double> z0(16), eps(16), az0(16), aeps(16);
    for (std::size_t i = 0; i < z0.size(); ++i) {
      z0[i] = rng.uniform(-5, 5);
      eps[i] = rng.uniform(-5, 5);
      az0[i] = a * z0[i];
      aeps[i] = a * eps[i];
    }
    const int t = static_cast<int>(1 + rng.next_below(200));
    const auto scaled = add_noise(az0, t, aeps, sched);
    const auto base = add_noise(z0, t, eps, sched);
    for (std::size_t i = 0; i < z0.size(); ++i) {
      const double expected = a * base[i];
      const double tol = 1e-15 * std::max(1.0, std::abs(expected));
      CHECK(std::abs(scaled[i] - expected) <= 4 * tol);
    }
  }
}

TEST_CASE("add_noise validates steps and shapes") {
  const NoiseSchedule sched = linear_schedule(10, 1e-4, 2e-2);
  std::vector<double> z0{1.0}, eps{0.0};
  CHECK_THROWS_AS(add_noise(z0, 0, eps, sched), StepOutOfRange);
  CHECK_THROWS_AS(add_noise(z0, 11, eps, sched), StepOutOfRange);
  CHECK_THROWS_AS(add_noise(z0, 5, std::vector<double>{1.0, 2.0}, sched), DimMismatch);
}

TEST_CASE("frame mask edge probabilities") {
  SUBCASE("p = 0 noises every frame") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const FrameMask mask = sample_frame_mask(8, 0.0, seed);
      for (bool c : mask.clean) CHECK_FALSE(c);
      for (int t : mask.timesteps) CHECK(t >= 1);
    }
  }
  SUBCASE("p = 1 keeps the first frame clean at timestep 0") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const FrameMask mask = sample_frame_mask(8, 1.0, seed);
      CHECK(mask.clean[0]);
      CHECK(mask.timesteps[0] == 0);
      for (std::size_t i = 1; i < mask.clean.size(); ++i) {
        CHECK_FALSE(mask.clean[i]);
        CHECK(mask.timesteps[i] >= 1);
      }
    }
  }
}

TEST_CASE("only frame zero may be clean and sampling is seed-deterministic") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const FrameMask a = sample_frame_mask(16, 0.7, seed);
    const FrameMask b = sample_frame_mask(16, 0.7, seed);
    CHECK(a.clean == b.clean);
    CHECK(a.timesteps == b.timesteps);
    for (std::size_t i = 1; i < a.clean.size(); ++i) CHECK_FALSE(a.clean[i]);
  }
}

TEST_CASE("clean-first rate concentrates near p over many seeds") {
  const double p = 0.2;
  int clean = 0;
  const int draws = 100000;
  for (int seed = 0; seed < draws; ++seed)
    if (sample_frame_mask(16, p, static_cast<std::uint64_t>(seed)).clean[0]) ++clean;
  const double rate = static_cast<double>(clean) / draws;
  CHECK(std::abs(rate - p) < 0.005);
}

TEST_CASE("schedule CSV carries t, beta, alpha_bar rows") {
  const NoiseSchedule sched = linear_schedule(3, 0.1, 0.3);
  const std::string csv = schedule_csv(sched);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,beta,alpha_bar");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    // t,beta,alpha_bar and both numbers re-parse to the table values
    const auto c1 = line.find(','), c2 = line.rfind(',');
    REQUIRE(c1 != std::string::npos);
    REQUIRE(c2 > c1);
    const int t = std::stoi(line.substr(0, c1));
    CHECK(std::stod(line.substr(c1 + 1, c2 - c1 - 1)) == sched.beta(t));
    CHECK(std::stod(line.substr(c2 + 1)) == sched.alpha_bar(t));
  }
  CHECK(rows == 3);
}
