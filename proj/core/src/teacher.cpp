#include "gdmd/teacher.hpp"

#include "gdmd/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gdmd::teacher {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

std::vector<std::size_t> components_for(const GaussianMixture& gmm, int cond) {
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < gmm.components.size(); ++k) {
        if (gmm.components[k].label == cond) idx.push_back(k);
    }
    if (idx.empty()) {
        throw contract_error("GaussianMixture: no components for condition " +
                             std::to_string(cond));
    }
    return idx;
}

}  // namespace

std::size_t GaussianMixture::dim() const {
    if (components.empty()) throw contract_error("GaussianMixture: empty mixture");
    return components.front().mean.numel();
}

int GaussianMixture::n_conditions() const {
    int max_label = -1;
    for (const MixtureComponent& c : components) max_label = std::max(max_label, c.label);
    return max_label + 1;
}

void GaussianMixture::validate() const {
    if (components.empty()) throw contract_error("GaussianMixture: empty mixture");
    const std::size_t d = components.front().mean.numel();
    double weight_sum = 0.0;
    std::vector<bool> seen(static_cast<std::size_t>(n_conditions()), false);
    for (const MixtureComponent& c : components) {
        if (c.weight <= 0.0) throw contract_error("GaussianMixture: weights must be positive");
        if (c.mean.numel() != d || c.variance.numel() != d) {
            throw contract_error("GaussianMixture: mean/variance dim mismatch");
        }
        for (double v : c.variance.data) {
            if (!(v > 0.0)) throw contract_error("GaussianMixture: variances must be positive");
        }
        if (c.label < 0) throw contract_error("GaussianMixture: labels must be non-negative");
        seen[static_cast<std::size_t>(c.label)] = true;
        weight_sum += c.weight;
    }
    if (std::abs(weight_sum - 1.0) > 1e-9) {
        throw contract_error("GaussianMixture: weights must sum to 1");
    }
    for (std::size_t c = 0; c < seen.size(); ++c) {
        if (!seen[c]) {
            throw contract_error("GaussianMixture: condition " + std::to_string(c) +
                                 " has no components");
        }
    }
}

GaussianMixture GaussianMixture::ring_world() {
    constexpr double radius = 4.0;
    constexpr double sigma = 0.35;
    const double var = sigma * sigma;

    auto comp = [&](double w, double cx, double cy, int label) {
        MixtureComponent c;
        c.weight = w;
        c.mean = Tensor::of({cx, cy});
        c.variance = Tensor::of({var, var});
        c.label = label;
        return c;
    };

    GaussianMixture gmm;
    // conditions 0 and 2: single cluster; 1 and 3: two nearby clusters
    gmm.components.push_back(comp(0.25, radius, 0.0, 0));
    gmm.components.push_back(comp(0.125, -0.7, radius, 1));
    gmm.components.push_back(comp(0.125, 0.7, radius, 1));
    gmm.components.push_back(comp(0.25, -radius, 0.0, 2));
    gmm.components.push_back(comp(0.125, -0.7, -radius, 3));
    gmm.components.push_back(comp(0.125, 0.7, -radius, 3));
    gmm.validate();
    return gmm;
}

Tensor sample_real(const GaussianMixture& gmm, std::size_t n, int cond, Rng& rng) {
    if (n == 0) throw contract_error("sample_real: n must be positive");
    std::vector<int> labels(n, cond);
    return sample_real(gmm, labels, rng);
}

Tensor sample_real(const GaussianMixture& gmm, const std::vector<int>& cond, Rng& rng) {
    gmm.validate();
    const std::size_t d = gmm.dim();
    Tensor out = Tensor::zeros({cond.size(), d});
    for (std::size_t b = 0; b < cond.size(); ++b) {
        const std::vector<std::size_t> idx = components_for(gmm, cond[b]);
        double total = 0.0;
        for (std::size_t k : idx) total += gmm.components[k].weight;
        const double u = rng.uniform() * total;
        std::size_t chosen = idx.back();
        double acc = 0.0;
        for (std::size_t k : idx) {
            acc += gmm.components[k].weight;
            if (u < acc) {
                chosen = k;
                break;
            }
        }
        const MixtureComponent& c = gmm.components[chosen];
        for (std::size_t j = 0; j < d; ++j) {
            out.at(b, j) = c.mean[j] + std::sqrt(c.variance[j]) * rng.normal();
        }
    }
    return out;
}

std::vector<double> posterior_responsibilities(const GaussianMixture& gmm, const Tensor& x_row,
                                               double t, int cond) {
    const std::size_t d = gmm.dim();
    if (x_row.numel() != d) throw contract_error("posterior_responsibilities: dim mismatch");
    const std::vector<std::size_t> idx = components_for(gmm, cond);

    std::vector<double> log_terms(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        const MixtureComponent& c = gmm.components[idx[i]];
        double log_pdf = std::log(c.weight);
        for (std::size_t j = 0; j < d; ++j) {
            const double m = (1.0 - t) * c.mean[j];
            const double s2 = (1.0 - t) * (1.0 - t) * c.variance[j] + t * t;
            const double diff = x_row[j] - m;
            log_pdf -= 0.5 * (diff * diff / s2 + std::log(s2) + kLog2Pi);
        }
        log_terms[i] = log_pdf;
    }
    const double max_log = *std::max_element(log_terms.begin(), log_terms.end());
    double denom = 0.0;
    for (double& lt : log_terms) {
        lt = std::exp(lt - max_log);
        denom += lt;
    }
    for (double& lt : log_terms) lt /= denom;
    return log_terms;
}

std::size_t argmax_responsibility(const GaussianMixture& gmm, const Tensor& x_row) {
    const std::size_t d = gmm.dim();
    if (x_row.numel() != d) throw contract_error("argmax_responsibility: dim mismatch");
    double best = -1e300;
    std::size_t best_k = 0;
    for (std::size_t k = 0; k < gmm.components.size(); ++k) {
        const MixtureComponent& c = gmm.components[k];
        double log_pdf = std::log(c.weight);
        for (std::size_t j = 0; j < d; ++j) {
            const double diff = x_row[j] - c.mean[j];
            log_pdf -= 0.5 * (diff * diff / c.variance[j] + std::log(c.variance[j]) + kLog2Pi);
        }
        if (log_pdf > best) {
            best = log_pdf;
            best_k = k;
        }
    }
    return best_k;
}

Tensor analytic_denoise(const GaussianMixture& gmm, const Tensor& x_t, double t,
                        const std::vector<int>& cond) {
    gmm.validate();
    if (!(t >= 0.0 && t <= 1.0)) throw contract_error("analytic_denoise: t must lie in [0,1]");
    const std::size_t d = gmm.dim();
    if (x_t.shape.size() != 2 || x_t.cols() != d || x_t.rows() != cond.size()) {
        throw contract_error("analytic_denoise: x_t must be [batch, dim] matching cond");
    }
    require_finite(x_t, "analytic_denoise(x_t)");

    Tensor out = Tensor::zeros(x_t.shape);
    for (std::size_t b = 0; b < cond.size(); ++b) {
        const Tensor row = x_t.row_copy(b);
        const std::vector<std::size_t> idx = components_for(gmm, cond[b]);
        const std::vector<double> resp = posterior_responsibilities(gmm, row, t, cond[b]);
        for (std::size_t i = 0; i < idx.size(); ++i) {
            const MixtureComponent& c = gmm.components[idx[i]];
            for (std::size_t j = 0; j < d; ++j) {
                // E[x0 | x_t, comp] = mu + (1-t) Sigma / ((1-t)^2 Sigma + t^2) * (x_t - (1-t) mu)
                const double s2 = (1.0 - t) * (1.0 - t) * c.variance[j] + t * t;
                const double gain = (1.0 - t) * c.variance[j] / s2;
                const double post = c.mean[j] + gain * (row[j] - (1.0 - t) * c.mean[j]);
                out.at(b, j) += resp[i] * post;
            }
        }
    }
    require_finite(out, "analytic_denoise(output)");
    return out;
}

const nn::MlpModel& TeacherModel::learned_model() const {
    if (!is_learned()) throw contract_error("TeacherModel: not a learned teacher");
    return std::get<nn::MlpModel>(kind_);
}

const GaussianMixture& TeacherModel::mixture() const {
    if (is_learned()) throw contract_error("TeacherModel: learned teacher has no mixture");
    return std::get<GaussianMixture>(kind_);
}

TeacherModel TeacherModel::make_analytic(GaussianMixture gmm) {
    gmm.validate();
    TeacherModel t;
    t.kind_ = std::move(gmm);
    return t;
}

TeacherModel TeacherModel::make_learned(nn::MlpModel model) {
    model.validate();
    TeacherModel t;
    t.kind_ = std::move(model);
    return t;
}

Tensor TeacherModel::denoise(const Tensor& x_t, double t, const std::vector<int>& cond) const {
    if (is_learned()) {
        const nn::MlpModel& model = std::get<nn::MlpModel>(kind_);
        const Tensor onehot = nn::one_hot(cond, model.cond_dim);
        const Tensor v = nn::mlp_forward(model, x_t, t, onehot);
        return flow::solve_to_x0(v, x_t, t);
    }
    return analytic_denoise(std::get<GaussianMixture>(kind_), x_t, t, cond);
}

flow::VelocityFn TeacherModel::velocity_fn() const {
    if (is_learned()) {
        const nn::MlpModel model = std::get<nn::MlpModel>(kind_);
        return [model](const Tensor& x, double t, const std::vector<int>& cond) {
            return nn::mlp_forward(model, x, t, nn::one_hot(cond, model.cond_dim));
        };
    }
    const GaussianMixture gmm = std::get<GaussianMixture>(kind_);
    return [gmm](const Tensor& x, double t, const std::vector<int>& cond) {
        const double t_eff = std::max(t, flow::kTFloor);
        const Tensor x0_hat = analytic_denoise(gmm, x, t, cond);
        Tensor v = x;
        for (std::size_t i = 0; i < v.data.size(); ++i) {
            v.data[i] = (x.data[i] - x0_hat.data[i]) / t_eff;
        }
        return v;
    };
}

std::uint64_t TeacherModel::parameter_hash() const {
    if (!is_learned()) return 0;
    return nn::param_hash(nn::collect_params(std::get<nn::MlpModel>(kind_)));
}

TeacherTrainResult train_learned_teacher(const GaussianMixture& data,
                                         const TeacherTrainConfig& config) {
    data.validate();
    Rng rng(config.seed);
    Rng init_rng = rng.fork("teacher-init");

    nn::MlpSpec spec;
    spec.input_dim = data.dim();
    spec.cond_dim = static_cast<std::size_t>(data.n_conditions());
    spec.time_embed_dim = config.time_embed_dim;
    spec.output_dim = data.dim();
    spec.hidden = config.hidden;
    spec.activation = config.activation;

    nn::MlpModel model = nn::make_mlp(spec, init_rng);
    nn::ParamList params = nn::collect_params(model);
    nn::OptimizerState opt = nn::make_adam(params, config.learning_rate);

    std::vector<double> losses;
    losses.reserve(config.steps);
    const std::size_t batch = config.batch_size;
    const int n_cond = data.n_conditions();

    for (std::size_t step = 0; step < config.steps; ++step) {
        std::vector<int> cond(batch);
        for (int& c : cond) c = rng.uniform_int(n_cond);
        const Tensor x0 = sample_real(data, cond, rng);
        const Tensor eps = Tensor::randn(x0.shape, rng);
        const double t = rng.uniform();
        const Tensor x_t = flow::forward_diffuse(x0, eps, t);

        const Tensor onehot = nn::one_hot(cond, spec.cond_dim);
        const Tensor v = nn::mlp_forward(model, x_t, t, onehot);

        double loss = 0.0;
        Tensor upstream = Tensor::zeros(v.shape);
        const double inv_batch = 1.0 / static_cast<double>(batch);
        for (std::size_t i = 0; i < v.data.size(); ++i) {
            const double resid = v.data[i] - (eps.data[i] - x0.data[i]);
            loss += resid * resid;
            upstream.data[i] = 2.0 * resid * inv_batch;
        }
        loss *= inv_batch;
        if (!std::isfinite(loss)) {
            throw numeric_error("train_learned_teacher: loss diverged (NaN) at step " +
                                std::to_string(step));
        }
        losses.push_back(loss);

        nn::MlpGradients grads = nn::mlp_backward(model, x_t, t, onehot, upstream);
        nn::adam_step(opt, params, grads.param_grads);
        nn::assign_params(model, params);
    }

    TeacherTrainResult result{TeacherModel::make_learned(std::move(model)), std::move(losses)};
    return result;
}

}  // namespace gdmd::teacher
