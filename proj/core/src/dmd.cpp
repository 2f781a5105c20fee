#include "gdmd/dmd.hpp"

#include "gdmd/error.hpp"

#include <cmath>
#include <string>

namespace gdmd::dmd {

FakeScore make_fake_score(const nn::MlpModel& init, double learning_rate) {
    FakeScore fake;
    fake.model = init;
    fake.model.validate();
    fake.optimizer = nn::make_adam(nn::collect_params(init), learning_rate);
    return fake;
}

DmdGradient dmd_gradient(const teacher::TeacherModel& teacher, const FakeScore& fake,
                         const Tensor& x0, double t, const Tensor& eps,
                         const std::vector<int>& cond) {
    if (!(t > 0.0 && t < 1.0)) throw contract_error("dmd_gradient: t must lie in (0,1)");
    require_same_shape(x0, eps, "dmd_gradient");
    require_finite(x0, "dmd_gradient(x0)");

    const std::size_t batch = x0.rows();
    const std::size_t dim = x0.cols();
    const Tensor x_t = flow::forward_diffuse(x0, eps, t);

    const Tensor x0_real = teacher.denoise(x_t, t, cond);
    const Tensor onehot = nn::one_hot(cond, fake.model.cond_dim);
    const Tensor v_fake = nn::mlp_forward(fake.model, x_t, t, onehot);
    const Tensor x0_fake = flow::solve_to_x0(v_fake, x_t, t);
    require_finite(x0_real, "dmd_gradient(real denoiser)");
    require_finite(x0_fake, "dmd_gradient(fake denoiser)");

    DmdGradient out;
    out.t_used = t;
    out.fake_version = fake.version_counter;
    out.grad = Tensor::zeros(x0.shape);
    out.normalizer.resize(batch);
    for (std::size_t b = 0; b < batch; ++b) {
        double scale = 0.0;
        for (std::size_t j = 0; j < dim; ++j) scale += std::abs(x0.at(b, j) - x0_real.at(b, j));
        scale /= static_cast<double>(dim);
        scale = std::max(scale, kNormalizerFloor);
        out.normalizer[b] = scale;
        for (std::size_t j = 0; j < dim; ++j) {
            out.grad.at(b, j) = (x0_fake.at(b, j) - x0_real.at(b, j)) / scale;
        }
    }
    return out;
}

ImplicitTarget build_x_tar(const Tensor& x0, const DmdGradient& grad) {
    require_same_shape(x0, grad.grad, "build_x_tar");
    ImplicitTarget target;
    target.x_tar = x0 - grad.grad;
    target.t_used = grad.t_used;
    target.fake_version = grad.fake_version;
    return target;
}

LossAndGrads dmd_loss_and_grads(const nn::MlpModel& generator, const flow::NoisyState& noisy,
                                const Tensor& x_tar) {
    require_same_shape(noisy.x_t, x_tar, "dmd_loss_and_grads");
    const std::size_t batch = noisy.x_t.rows();
    const Tensor onehot = nn::one_hot(noisy.cond, generator.cond_dim);
    const Tensor v = nn::mlp_forward(generator, noisy.x_t, noisy.t, onehot);
    const Tensor x0_hat = flow::solve_to_x0(v, noisy.x_t, noisy.t);

    LossAndGrads out;
    const double inv_batch = 1.0 / static_cast<double>(batch);
    Tensor upstream = Tensor::zeros(v.shape);
    for (std::size_t i = 0; i < x0_hat.data.size(); ++i) {
        const double resid = x0_hat.data[i] - x_tar.data[i];
        out.loss += 0.5 * resid * resid;
        // d x0_hat / d v = -t
        upstream.data[i] = -noisy.t * resid * inv_batch;
    }
    out.loss *= inv_batch;
    out.param_grads =
        nn::mlp_backward(generator, noisy.x_t, noisy.t, onehot, upstream).param_grads;
    return out;
}

double fake_denoise_update(FakeScore& fake, const Tensor& x0_detached, double t,
                           const Tensor& eps, const std::vector<int>& cond) {
    require_same_shape(x0_detached, eps, "fake_denoise_update");
    const std::size_t batch = x0_detached.rows();
    const Tensor x_t = flow::forward_diffuse(x0_detached, eps, t);
    const Tensor onehot = nn::one_hot(cond, fake.model.cond_dim);
    const Tensor v = nn::mlp_forward(fake.model, x_t, t, onehot);
    const Tensor x0_hat = flow::solve_to_x0(v, x_t, t);

    double loss = 0.0;
    const double inv_batch = 1.0 / static_cast<double>(batch);
    Tensor upstream = Tensor::zeros(v.shape);
    for (std::size_t i = 0; i < x0_hat.data.size(); ++i) {
        const double resid = x0_hat.data[i] - x0_detached.data[i];
        loss += resid * resid;
        upstream.data[i] = -t * 2.0 * resid * inv_batch;
    }
    loss *= inv_batch;
    if (!std::isfinite(loss)) {
        throw numeric_error("fake_denoise_update: denoising loss is NaN (fake version " +
                            std::to_string(fake.version_counter) + ")");
    }

    nn::ParamList params = nn::collect_params(fake.model);
    const nn::MlpGradients grads = nn::mlp_backward(fake.model, x_t, t, onehot, upstream);
    nn::adam_step(fake.optimizer, params, grads.param_grads);
    nn::assign_params(fake.model, params);
    fake.version_counter += 1;
    return loss;
}

}  // namespace gdmd::dmd
