#pragma once

#include "gdmd/tensor.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace gdmd {
class Rng;
}

namespace gdmd::flow {

// Interpolation convention, fixed repo-wide: x_t = (1-t)*x0 + t*eps, so t=0
// is clean data and t=1 pure noise. Models predict velocity v with ground
// truth v* = eps - x0; one solver application gives x0_hat = x_t - t*v.

/// Below this t the velocity/target conversion is considered degenerate.
inline constexpr double kTFloor = 1e-3;

struct DiscreteSchedule {
    std::vector<double> timesteps;  // strictly decreasing, first == 1.0, all in (0,1]

    static DiscreteSchedule uniform(std::size_t steps);
    void validate() const;
    bool contains(double t) const;
};

struct NoisyState {
    Tensor x_t;
    double t = 0.0;
    std::vector<int> cond;
};

using VelocityFn =
    std::function<Tensor(const Tensor& x, double t, const std::vector<int>& cond)>;

Tensor forward_diffuse(const Tensor& x0, const Tensor& eps, double t);
Tensor solve_to_x0(const Tensor& v, const Tensor& x_t, double t);

/// Velocity whose solver output is x_tar: (x_t - x_tar)/t. Throws for
/// t <= kTFloor (degenerate timestep).
Tensor target_velocity(const Tensor& x_tar, const Tensor& x_t, double t);

/// Deterministic Euler sampler along the schedule (t after the last step is 0).
Tensor ode_sample(const VelocityFn& model, const Tensor& z, const DiscreteSchedule& schedule,
                  const std::vector<int>& cond);

struct SdeTrajectory {
    std::vector<NoisyState> states;  // state at each schedule time, before stepping
    Tensor x0;
};

/// Euler-Maruyama analog of ode_sample: every Euler step is perturbed by
/// noise_scale * sqrt(dt) * fresh Gaussian noise. noise_scale == 0 reduces
/// bit-exactly to ode_sample.
SdeTrajectory sde_sample(const VelocityFn& model, const Tensor& z,
                         const DiscreteSchedule& schedule, const std::vector<int>& cond,
                         double noise_scale, Rng& rng);

/// Detached partial rollout: Euler steps from t=1 down to the requested
/// schedule time, returning the intermediate state (t == 1 returns z as is).
Tensor back_sim(const VelocityFn& model, const Tensor& z, double t,
                const DiscreteSchedule& schedule, const std::vector<int>& cond);

/// Process-wide count of sde_sample calls (test probe for no-SDE contracts).
std::uint64_t sde_sample_invocations();

}  // namespace gdmd::flow
