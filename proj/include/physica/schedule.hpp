#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace physica {

/// DDPM forward-noising tables: alpha_bars[t-1] = prod_{i<=t} (1 - beta_i).
struct NoiseSchedule {
  std::vector<double> betas;
  std::vector<double> alpha_bars;

  int steps() const { return static_cast<int>(betas.size()); }

  /// 1-based step index. Throws StepOutOfRange.
  double alpha_bar(int t) const;
  double beta(int t) const;
};

/// Betas linearly spaced over [beta_start, beta_end] inclusive. Throws
/// InvalidRange unless 0 < beta_start <= beta_end < 1 and steps >= 1.
NoiseSchedule linear_schedule(int steps, double beta_start, double beta_end);

/// z_t = sqrt(alpha_bar_t) z0 + sqrt(1 - alpha_bar_t) eps, elementwise.
/// Throws StepOutOfRange / DimMismatch.
std::vector<double> add_noise(const std::vector<double>& z0, int t,
                              const std::vector<double>& eps, const NoiseSchedule& sched);

/// Which frames receive noise during training. Only frame 0 may be clean;
/// clean frames carry timestep 0, noised frames share one sampled step.
struct FrameMask {
  std::vector<bool> clean;
  std::vector<int> timesteps;
};

FrameMask sample_frame_mask(int num_frames, double p_clean_first, std::uint64_t seed,
                            int steps = 1000);

/// CSV with header "t,beta,alpha_bar", one row per step.
std::string schedule_csv(const NoiseSchedule& sched);

}  // namespace physica
