#include "gdmd/flow.hpp"

#include "gdmd/error.hpp"
#include "gdmd/rng.hpp"

#include <atomic>
#include <cmath>
#include <string>

namespace gdmd::flow {

namespace {

std::atomic<std::uint64_t> g_sde_invocations{0};

void check_t_range(double t, const char* where) {
    if (!(t >= 0.0 && t <= 1.0)) {
        throw contract_error(std::string(where) + ": t must lie in [0,1]");
    }
}

}  // namespace

DiscreteSchedule DiscreteSchedule::uniform(std::size_t steps) {
    if (steps == 0) throw contract_error("DiscreteSchedule::uniform: steps must be positive");
    DiscreteSchedule s;
    const double n = static_cast<double>(steps);
    for (std::size_t i = 0; i < steps; ++i) {
        s.timesteps.push_back((n - static_cast<double>(i)) / n);
    }
    return s;
}

void DiscreteSchedule::validate() const {
    if (timesteps.empty()) throw contract_error("DiscreteSchedule: empty schedule");
    if (timesteps.front() != 1.0) throw contract_error("DiscreteSchedule: first timestep must be 1.0");
    for (std::size_t i = 0; i < timesteps.size(); ++i) {
        const double t = timesteps[i];
        if (!(t > 0.0 && t <= 1.0)) throw contract_error("DiscreteSchedule: timesteps must lie in (0,1]");
        if (i > 0 && !(t < timesteps[i - 1])) {
            throw contract_error("DiscreteSchedule: timesteps must be strictly decreasing");
        }
    }
}

bool DiscreteSchedule::contains(double t) const {
    for (double s : timesteps) {
        if (s == t) return true;
    }
    return false;
}

Tensor forward_diffuse(const Tensor& x0, const Tensor& eps, double t) {
    require_same_shape(x0, eps, "forward_diffuse");
    check_t_range(t, "forward_diffuse");
    Tensor out = x0;
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        out.data[i] = (1.0 - t) * x0.data[i] + t * eps.data[i];
    }
    return out;
}

Tensor solve_to_x0(const Tensor& v, const Tensor& x_t, double t) {
    require_same_shape(v, x_t, "solve_to_x0");
    check_t_range(t, "solve_to_x0");
    Tensor out = x_t;
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        out.data[i] = x_t.data[i] - t * v.data[i];
    }
    return out;
}

Tensor target_velocity(const Tensor& x_tar, const Tensor& x_t, double t) {
    require_same_shape(x_tar, x_t, "target_velocity");
    if (t <= kTFloor) {
        throw contract_error("target_velocity: degenerate timestep t=" + std::to_string(t));
    }
    Tensor out = x_t;
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        out.data[i] = (x_t.data[i] - x_tar.data[i]) / t;
    }
    return out;
}

Tensor ode_sample(const VelocityFn& model, const Tensor& z, const DiscreteSchedule& schedule,
                  const std::vector<int>& cond) {
    schedule.validate();
    Tensor x = z;
    for (std::size_t i = 0; i < schedule.timesteps.size(); ++i) {
        const double t = schedule.timesteps[i];
        const double t_next = (i + 1 < schedule.timesteps.size()) ? schedule.timesteps[i + 1] : 0.0;
        const Tensor v = model(x, t, cond);
        require_same_shape(v, x, "ode_sample(velocity)");
        const double dt = t - t_next;
        for (std::size_t j = 0; j < x.data.size(); ++j) x.data[j] -= dt * v.data[j];
    }
    return x;
}

SdeTrajectory sde_sample(const VelocityFn& model, const Tensor& z,
                         const DiscreteSchedule& schedule, const std::vector<int>& cond,
                         double noise_scale, Rng& rng) {
    schedule.validate();
    if (noise_scale < 0.0) throw contract_error("sde_sample: noise_scale must be >= 0");
    g_sde_invocations.fetch_add(1, std::memory_order_relaxed);

    SdeTrajectory traj;
    Tensor x = z;
    for (std::size_t i = 0; i < schedule.timesteps.size(); ++i) {
        const double t = schedule.timesteps[i];
        const double t_next = (i + 1 < schedule.timesteps.size()) ? schedule.timesteps[i + 1] : 0.0;
        traj.states.push_back(NoisyState{x, t, cond});
        const Tensor v = model(x, t, cond);
        require_same_shape(v, x, "sde_sample(velocity)");
        const double dt = t - t_next;
        for (std::size_t j = 0; j < x.data.size(); ++j) x.data[j] -= dt * v.data[j];
        if (noise_scale > 0.0) {
            const double sigma = noise_scale * std::sqrt(dt);
            for (std::size_t j = 0; j < x.data.size(); ++j) x.data[j] += sigma * rng.normal();
        }
    }
    traj.x0 = std::move(x);
    return traj;
}

Tensor back_sim(const VelocityFn& model, const Tensor& z, double t,
                const DiscreteSchedule& schedule, const std::vector<int>& cond) {
    schedule.validate();
    if (!schedule.contains(t)) {
        throw contract_error("back_sim: t=" + std::to_string(t) + " is not a schedule timestep");
    }
    Tensor x = z;
    for (std::size_t i = 0; i + 1 < schedule.timesteps.size() && schedule.timesteps[i] > t; ++i) {
        const double t_cur = schedule.timesteps[i];
        const double t_next = schedule.timesteps[i + 1];
        if (t_next < t) break;
        const Tensor v = model(x, t_cur, cond);
        require_same_shape(v, x, "back_sim(velocity)");
        const double dt = t_cur - t_next;
        for (std::size_t j = 0; j < x.data.size(); ++j) x.data[j] -= dt * v.data[j];
    }
    return x;
}

std::uint64_t sde_sample_invocations() {
    return g_sde_invocations.load(std::memory_order_relaxed);
}

}  // namespace gdmd::flow
