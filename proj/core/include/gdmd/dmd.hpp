#pragma once

#include "gdmd/adam.hpp"
#include "gdmd/flow.hpp"
#include "gdmd/teacher.hpp"

namespace gdmd::dmd {

/// Gradient-scale normalizers are clamped below by this floor.
inline constexpr double kNormalizerFloor = 1e-3;

/// Dynamic denoiser tracking the generator's output distribution.
struct FakeScore {
    nn::MlpModel model;
    nn::OptimizerState optimizer;
    long version_counter = 0;
};

FakeScore make_fake_score(const nn::MlpModel& init, double learning_rate);

/// Score-difference direction in x0 space, with per-sample normalization.
struct DmdGradient {
    Tensor grad;  // [batch, dim]
    double t_used = 0.0;
    long fake_version = 0;
    std::vector<double> normalizer;  // per sample, > 0
};

struct ImplicitTarget {
    Tensor x_tar;  // x0 - grad, exact
    double t_used = 0.0;
    long fake_version = 0;
};

/// Real/fake denoiser difference at a shared diffused state:
/// grad = (x0_fake_hat - x0_real_hat) / normalizer, with the per-sample
/// normalizer mean_dims|x0 - x0_real_hat| clamped below by kNormalizerFloor.
DmdGradient dmd_gradient(const teacher::TeacherModel& teacher, const FakeScore& fake,
                         const Tensor& x0, double t, const Tensor& eps,
                         const std::vector<int>& cond);

ImplicitTarget build_x_tar(const Tensor& x0, const DmdGradient& grad);

struct LossAndGrads {
    double loss = 0.0;
    nn::ParamList param_grads;
};

/// Distillation surrogate: loss = 0.5 * mean_batch ||x0_hat - x_tar||^2 with
/// x0_hat = solve_to_x0(generator velocity at the noisy state); returns the
/// loss and the exact parameter gradients through the solver chain.
LossAndGrads dmd_loss_and_grads(const nn::MlpModel& generator, const flow::NoisyState& noisy,
                                const Tensor& x_tar);

/// One denoising regression step of the fake score on detached generator
/// output; applies one Adam update and bumps version_counter. Returns the loss.
double fake_denoise_update(FakeScore& fake, const Tensor& x0_detached, double t,
                           const Tensor& eps, const std::vector<int>& cond);

}  // namespace gdmd::dmd
