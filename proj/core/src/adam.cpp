#include "gdmd/adam.hpp"

#include "gdmd/error.hpp"

#include <cmath>
#include <string>

namespace gdmd::nn {

namespace {

std::string param_path(std::size_t flat_index, std::size_t entry) {
    const std::size_t layer = flat_index / 2;
    const bool is_weight = (flat_index % 2) == 0;
    return "layer[" + std::to_string(layer) + "]." + (is_weight ? "weight" : "bias") +
           "[" + std::to_string(entry) + "]";
}

}  // namespace

OptimizerState make_adam(const ParamList& params, double learning_rate) {
    OptimizerState state;
    state.first_moment = zeros_like(params);
    state.second_moment = zeros_like(params);
    state.learning_rate = learning_rate;
    return state;
}

void adam_step(OptimizerState& state, ParamList& params, const ParamList& grads) {
    if (params.size() != grads.size() || params.size() != state.first_moment.size()) {
        throw contract_error("adam_step: parameter/gradient/state size mismatch");
    }
    for (std::size_t i = 0; i < grads.size(); ++i) {
        require_same_shape(params[i], grads[i], "adam_step");
        for (std::size_t j = 0; j < grads[i].data.size(); ++j) {
            if (!std::isfinite(grads[i].data[j])) {
                throw numeric_error("adam_step: non-finite gradient at " + param_path(i, j));
            }
        }
    }

    state.step_count += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step_count));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step_count));
    for (std::size_t i = 0; i < params.size(); ++i) {
        double* p = params[i].data.data();
        double* m = state.first_moment[i].data.data();
        double* v = state.second_moment[i].data.data();
        const double* g = grads[i].data.data();
        const std::size_t n = params[i].data.size();
        for (std::size_t j = 0; j < n; ++j) {
            m[j] = state.beta1 * m[j] + (1.0 - state.beta1) * g[j];
            v[j] = state.beta2 * v[j] + (1.0 - state.beta2) * g[j] * g[j];
            const double m_hat = m[j] / bc1;
            const double v_hat = v[j] / bc2;
            p[j] -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
        }
    }
}

}  // namespace gdmd::nn
