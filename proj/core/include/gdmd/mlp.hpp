#pragma once

#include "gdmd/tensor.hpp"

#include <cstdint>
#include <vector>

namespace gdmd::nn {

enum class Activation { Tanh, Silu };

struct Layer {
    Tensor weight;  // [out, in]
    Tensor bias;    // [out]
};

/// Conditional velocity-field MLP. The first layer consumes the concatenation
/// [x | one-hot condition | sinusoidal time embedding]; hidden layers apply
/// the activation, the final layer is linear and maps back to data space.
struct MlpModel {
    std::size_t input_dim = 0;
    std::size_t cond_dim = 0;
    std::size_t time_embed_dim = 0;
    std::size_t output_dim = 0;
    Activation activation = Activation::Silu;
    std::vector<Layer> layers;

    std::size_t joint_input_dim() const { return input_dim + cond_dim + time_embed_dim; }
    std::size_t parameter_count() const;
    void validate() const;
};

struct MlpSpec {
    std::size_t input_dim = 2;
    std::size_t cond_dim = 4;
    std::size_t time_embed_dim = 8;
    std::size_t output_dim = 2;
    std::vector<std::size_t> hidden = {128, 128, 128};
    Activation activation = Activation::Silu;
};

/// Seeded uniform He-style init (scaled by fan-in), zero biases.
MlpModel make_mlp(const MlpSpec& spec, Rng& rng);

/// Fixed sinusoidal map of t; dim must be even.
Tensor time_embedding(double t, std::size_t dim);

/// [batch, n_classes] one-hot rows; labels must lie in [0, n_classes).
Tensor one_hot(const std::vector<int>& cond, std::size_t n_classes);

Tensor mlp_forward(const MlpModel& model, const Tensor& x, double t, const Tensor& cond);

/// Parameters in a fixed flat order: layer 0 weight, layer 0 bias, layer 1 ...
using ParamList = std::vector<Tensor>;

struct MlpGradients {
    ParamList param_grads;
    Tensor input_grad;  // [batch, input_dim]; the x slice only
};

/// Exact gradients of sum(upstream ⊙ mlp_forward(model, x, t, cond)) with
/// respect to the parameters and to x. Batch reductions use a fixed order.
MlpGradients mlp_backward(const MlpModel& model, const Tensor& x, double t,
                          const Tensor& cond, const Tensor& upstream);

ParamList collect_params(const MlpModel& model);
void assign_params(MlpModel& model, const ParamList& params);
ParamList zeros_like(const ParamList& params);

double param_dot(const ParamList& a, const ParamList& b);
double param_norm(const ParamList& a);
/// y += alpha * x
void param_axpy(double alpha, const ParamList& x, ParamList& y);
bool params_all_finite(const ParamList& a);

/// FNV-1a over the raw little-endian parameter bytes, in flat order.
std::uint64_t param_hash(const ParamList& params);

}  // namespace gdmd::nn
