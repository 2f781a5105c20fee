#pragma once

#include "gdmd/flow.hpp"
#include "gdmd/mlp.hpp"
#include "gdmd/rng.hpp"

#include <cstdint>
#include <variant>
#include <vector>

namespace gdmd::teacher {

struct MixtureComponent {
    double weight = 0.0;
    Tensor mean;      // [dim]
    Tensor variance;  // [dim] diagonal covariance entries, all > 0
    int label = 0;
};

/// Labeled Gaussian mixture with diagonal covariances: the exactly known data
/// distribution. Conditions are the component labels, 0..n_conditions-1.
struct GaussianMixture {
    std::vector<MixtureComponent> components;

    std::size_t dim() const;
    int n_conditions() const;
    void validate() const;

    /// Default world: four labeled clusters on a ring of radius 4, sigma 0.35,
    /// two of the conditions split into two nearby components.
    static GaussianMixture ring_world();
};

/// i.i.d. draws from the mixture restricted to components labeled `cond`.
Tensor sample_real(const GaussianMixture& gmm, std::size_t n, int cond, Rng& rng);
/// Batch version with one label per row.
Tensor sample_real(const GaussianMixture& gmm, const std::vector<int>& cond, Rng& rng);

/// Exact posterior mean E[x0 | x_t, cond] under x_t = (1-t) x0 + t eps.
Tensor analytic_denoise(const GaussianMixture& gmm, const Tensor& x_t, double t,
                        const std::vector<int>& cond);

/// Posterior responsibilities over the components labeled `cond` for one
/// diffused sample (log-sum-exp normalized; sums to 1).
std::vector<double> posterior_responsibilities(const GaussianMixture& gmm, const Tensor& x_row,
                                               double t, int cond);

/// Index (into gmm.components) of the most responsible component at t=0.
std::size_t argmax_responsibility(const GaussianMixture& gmm, const Tensor& x_row);

/// Frozen real-score provider: either the analytic mixture denoiser or a
/// pre-trained velocity MLP.
class TeacherModel {
public:
    static TeacherModel make_analytic(GaussianMixture gmm);
    static TeacherModel make_learned(nn::MlpModel model);

    bool is_learned() const { return std::holds_alternative<nn::MlpModel>(kind_); }
    const nn::MlpModel& learned_model() const;
    const GaussianMixture& mixture() const;

    Tensor denoise(const Tensor& x_t, double t, const std::vector<int>& cond) const;
    flow::VelocityFn velocity_fn() const;

    /// Hash of the learned parameters (0 for the analytic teacher); constant
    /// for the lifetime of the object by the frozen-teacher contract.
    std::uint64_t parameter_hash() const;

private:
    TeacherModel() = default;
    std::variant<GaussianMixture, nn::MlpModel> kind_;
};

struct TeacherTrainConfig {
    std::size_t steps = 3000;
    std::size_t batch_size = 64;
    double learning_rate = 1e-3;
    std::uint64_t seed = 1234;
    std::vector<std::size_t> hidden = {128, 128, 128};
    std::size_t time_embed_dim = 8;
    nn::Activation activation = nn::Activation::Silu;
};

struct TeacherTrainResult {
    TeacherModel teacher;
    std::vector<double> losses;  // one flow-matching loss per step
};

/// Standard flow-matching pretraining against mixture samples; the returned
/// model is frozen. Throws numeric_error if the loss diverges.
TeacherTrainResult train_learned_teacher(const GaussianMixture& data,
                                         const TeacherTrainConfig& config);

}  // namespace gdmd::teacher
