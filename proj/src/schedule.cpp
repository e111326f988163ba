#include "physica/schedule.hpp"

#include "physica/errors.hpp"
#include "physica/rng.hpp"

#include <cmath>
#include <cstdio>

namespace physica {

double NoiseSchedule::alpha_bar(int t) const {
  if (t < 1 || t > steps()) throw StepOutOfRange("step " + std::to_string(t) + " out of range");
  return alpha_bars[static_cast<std::size_t>(t - 1)];
}

double NoiseSchedule::beta(int t) const {
  if (t < 1 || t > steps()) throw StepOutOfRange("step " + std::to_string(t) + " out of range");
  return betas[static_cast<std::size_t>(t - 1)];
}

NoiseSchedule linear_schedule(int steps, double beta_start, double beta_end) {
  if (steps < 1) throw InvalidRange("steps must be >= 1");
  if (!(beta_start > 0.0 && beta_start <= beta_end && beta_end < 1.0))
    throw InvalidRange("need 0 < beta_start <= beta_end < 1");

  NoiseSchedule sched;
  sched.betas.resize(static_cast<std::size_t>(steps));
  sched.alpha_bars.resize(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    sched.betas[static_cast<std::size_t>(i)] =
        steps == 1 ? beta_start
                   : beta_start + (beta_end - beta_start) * i / (steps - 1);
  }
  double running = 1.0;
  for (int i = 0; i < steps; ++i) {
    running *= 1.0 - sched.betas[static_cast<std::size_t>(i)];
    sched.alpha_bars[static_cast<std::size_t>(i)] = running;
  }
  return sched;
}

std::vector<double> add_noise(const std::vector<double>& z0, int t,
                              const std::vector<double>& eps, const NoiseSchedule& sched) {
  if (z0.size() != eps.size()) throw DimMismatch("z0 / eps shape mismatch");
  const double ab = sched.alpha_bar(t);
  const double signal = std::sqrt(ab);
  const double noise = std::sqrt(1.0 - ab);
  std::vector<double> out(z0.size());
  for (std::size_t i = 0; i < z0.size(); ++i) out[i] = signal * z0[i] + noise * eps[i];
  return out;
}

FrameMask sample_frame_mask(int num_frames, double p_clean_first, std::uint64_t seed,
                            int steps) {
  SplitMix64 rng(seed);
  const bool first_clean = rng.next_unit() < p_clean_first;
  const int shared_step = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(steps)));

  FrameMask mask;
  mask.clean.resize(static_cast<std::size_t>(num_frames), false);
  mask.timesteps.resize(static_cast<std::size_t>(num_frames), shared_step);
  if (num_frames > 0 && first_clean) {
    mask.clean[0] = true;
    mask.timesteps[0] = 0;
  }
  return mask;
}

std::string schedule_csv(const NoiseSchedule& sched) {
  std::string out = "t,beta,alpha_bar\n";
  char buf[80];
  for (int t = 1; t <= sched.steps(); ++t) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", t, sched.beta(t), sched.alpha_bar(t));
    out += buf;
  }
  return out;
}

}  // namespace physica
