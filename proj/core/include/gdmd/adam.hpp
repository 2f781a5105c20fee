#pragma once

#include "gdmd/mlp.hpp"

namespace gdmd::nn {

struct OptimizerState {
    ParamList first_moment;
    ParamList second_moment;
    long step_count = 0;
    double learning_rate = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

OptimizerState make_adam(const ParamList& params, double learning_rate);

/// One bias-corrected Adam update, in place. A non-finite gradient entry
/// rejects the whole step and throws numeric_error naming the parameter path.
void adam_step(OptimizerState& state, ParamList& params, const ParamList& grads);

}  // namespace gdmd::nn
