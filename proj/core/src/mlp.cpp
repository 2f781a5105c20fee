#include "gdmd/mlp.hpp"

#include "gdmd/error.hpp"
#include "gdmd/rng.hpp"

#include <cmath>
#include <cstring>
#include <string>

namespace gdmd::nn {

namespace {

double activate(Activation act, double z) {
    if (act == Activation::Tanh) return std::tanh(z);
    return z / (1.0 + std::exp(-z));  // silu
}

double activate_grad(Activation act, double z) {
    if (act == Activation::Tanh) {
        const double th = std::tanh(z);
        return 1.0 - th * th;
    }
    const double s = 1.0 / (1.0 + std::exp(-z));
    return s * (1.0 + z * (1.0 - s));
}

// y[batch, out] = h[batch, in] * W^T + b
void linear_forward(const Layer& layer, const Tensor& h, Tensor& y) {
    const std::size_t batch = h.rows();
    const std::size_t in = layer.weight.cols();
    const std::size_t out = layer.weight.rows();
    for (std::size_t b = 0; b < batch; ++b) {
        const double* hrow = &h.data[b * in];
        double* yrow = &y.data[b * out];
        for (std::size_t i = 0; i < out; ++i) {
            const double* wrow = &layer.weight.data[i * in];
            double acc = layer.bias.data[i];
            for (std::size_t j = 0; j < in; ++j) acc += wrow[j] * hrow[j];
            yrow[i] = acc;
        }
    }
}

// Joint input [x | one-hot cond | time embedding], one row per sample.
Tensor build_joint_input(const MlpModel& model, const Tensor& x, double t, const Tensor& cond) {
    const std::size_t batch = x.rows();
    const std::size_t joint = model.joint_input_dim();
    const Tensor embed = time_embedding(t, model.time_embed_dim);
    Tensor h = Tensor::zeros({batch, joint});
    for (std::size_t b = 0; b < batch; ++b) {
        double* row = &h.data[b * joint];
        for (std::size_t j = 0; j < model.input_dim; ++j) row[j] = x.at(b, j);
        for (std::size_t j = 0; j < model.cond_dim; ++j) row[model.input_dim + j] = cond.at(b, j);
        for (std::size_t j = 0; j < model.time_embed_dim; ++j) {
            row[model.input_dim + model.cond_dim + j] = embed[j];
        }
    }
    return h;
}

void check_forward_inputs(const MlpModel& model, const Tensor& x, double t, const Tensor& cond) {
    model.validate();
    if (x.shape.size() != 2 || x.cols() != model.input_dim) {
        throw contract_error("mlp_forward: x must be [batch, input_dim]");
    }
    if (cond.shape.size() != 2 || cond.cols() != model.cond_dim || cond.rows() != x.rows()) {
        throw contract_error("mlp_forward: cond must be [batch, cond_dim]");
    }
    if (!(t >= 0.0 && t <= 1.0)) {
        throw contract_error("mlp_forward: t must lie in [0,1]");
    }
    require_finite(x, "mlp_forward(x)");
    require_finite(cond, "mlp_forward(cond)");
}

}  // namespace

std::size_t MlpModel::parameter_count() const {
    std::size_t n = 0;
    for (const Layer& layer : layers) n += layer.weight.numel() + layer.bias.numel();
    return n;
}

void MlpModel::validate() const {
    if (layers.empty()) throw contract_error("MlpModel: no layers");
    std::size_t expect = joint_input_dim();
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const Layer& layer = layers[l];
        if (layer.weight.shape.size() != 2 || layer.bias.shape.size() != 1 ||
            layer.weight.rows() != layer.bias.numel()) {
            throw contract_error("MlpModel: malformed layer " + std::to_string(l));
        }
        if (layer.weight.cols() != expect) {
            throw contract_error("MlpModel: layer " + std::to_string(l) +
                                 " input dim does not chain");
        }
        expect = layer.weight.rows();
    }
    if (expect != output_dim) {
        throw contract_error("MlpModel: final layer does not produce output_dim");
    }
}

MlpModel make_mlp(const MlpSpec& spec, Rng& rng) {
    if (spec.input_dim == 0 || spec.output_dim == 0) {
        throw contract_error("make_mlp: input_dim and output_dim must be positive");
    }
    if (spec.time_embed_dim % 2 != 0) {
        throw contract_error("make_mlp: time_embed_dim must be even");
    }
    MlpModel model;
    model.input_dim = spec.input_dim;
    model.cond_dim = spec.cond_dim;
    model.time_embed_dim = spec.time_embed_dim;
    model.output_dim = spec.output_dim;
    model.activation = spec.activation;

    std::vector<std::size_t> dims;
    dims.push_back(model.joint_input_dim());
    for (std::size_t h : spec.hidden) dims.push_back(h);
    dims.push_back(spec.output_dim);

    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        const std::size_t in = dims[l];
        const std::size_t out = dims[l + 1];
        const double bound = std::sqrt(6.0 / static_cast<double>(in));
        Layer layer;
        layer.weight = Tensor::zeros({out, in});
        for (double& w : layer.weight.data) w = rng.uniform(-bound, bound);
        layer.bias = Tensor::zeros({out});
        model.layers.push_back(std::move(layer));
    }
    model.validate();
    return model;
}

Tensor time_embedding(double t, std::size_t dim) {
    if (dim % 2 != 0) throw contract_error("time_embedding: dim must be even");
    Tensor e = Tensor::zeros({dim});
    double freq = 1.0;
    for (std::size_t k = 0; k < dim / 2; ++k) {
        const double phase = freq * M_PI * t;
        e[2 * k] = std::sin(phase);
        e[2 * k + 1] = std::cos(phase);
        freq *= 2.0;
    }
    return e;
}

Tensor one_hot(const std::vector<int>& cond, std::size_t n_classes) {
    Tensor out = Tensor::zeros({cond.size(), n_classes});
    for (std::size_t b = 0; b < cond.size(); ++b) {
        if (cond[b] < 0 || static_cast<std::size_t>(cond[b]) >= n_classes) {
            throw contract_error("one_hot: label out of range");
        }
        out.at(b, static_cast<std::size_t>(cond[b])) = 1.0;
    }
    return out;
}

Tensor mlp_forward(const MlpModel& model, const Tensor& x, double t, const Tensor& cond) {
    check_forward_inputs(model, x, t, cond);
    const std::size_t batch = x.rows();
    Tensor h = build_joint_input(model, x, t, cond);
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        const Layer& layer = model.layers[l];
        Tensor y = Tensor::zeros({batch, layer.weight.rows()});
        linear_forward(layer, h, y);
        if (l + 1 < model.layers.size()) {
            for (double& v : y.data) v = activate(model.activation, v);
        }
        h = std::move(y);
    }
    require_finite(h, "mlp_forward(output)");
    return h;
}

MlpGradients mlp_backward(const MlpModel& model, const Tensor& x, double t,
                          const Tensor& cond, const Tensor& upstream) {
    check_forward_inputs(model, x, t, cond);
    if (upstream.shape.size() != 2 || upstream.rows() != x.rows() ||
        upstream.cols() != model.output_dim) {
        throw contract_error("mlp_backward: upstream must match forward output shape");
    }

    const std::size_t batch = x.rows();
    const std::size_t n_layers = model.layers.size();

    // forward pass caching layer inputs and pre-activations
    std::vector<Tensor> inputs;   // input to each layer
    std::vector<Tensor> preacts;  // pre-activation of each hidden layer
    inputs.reserve(n_layers);
    Tensor h = build_joint_input(model, x, t, cond);
    for (std::size_t l = 0; l < n_layers; ++l) {
        const Layer& layer = model.layers[l];
        inputs.push_back(h);
        Tensor y = Tensor::zeros({batch, layer.weight.rows()});
        linear_forward(layer, h, y);
        if (l + 1 < n_layers) {
            preacts.push_back(y);
            Tensor a = y;
            for (double& v : a.data) v = activate(model.activation, v);
            h = std::move(a);
        } else {
            h = std::move(y);
        }
    }

    MlpGradients grads;
    grads.param_grads.reserve(2 * n_layers);
    for (const Layer& layer : model.layers) {
        grads.param_grads.push_back(Tensor::zeros(layer.weight.shape));
        grads.param_grads.push_back(Tensor::zeros(layer.bias.shape));
    }

    Tensor delta = upstream;  // gradient wrt current layer's output
    for (std::size_t li = n_layers; li-- > 0;) {
        const Layer& layer = model.layers[li];
        const Tensor& input = inputs[li];
        const std::size_t in = layer.weight.cols();
        const std::size_t out = layer.weight.rows();
        Tensor& gw = grads.param_grads[2 * li];
        Tensor& gb = grads.param_grads[2 * li + 1];

        Tensor next_delta = Tensor::zeros({batch, in});
        for (std::size_t b = 0; b < batch; ++b) {
            const double* drow = &delta.data[b * out];
            const double* hrow = &input.data[b * in];
            double* nrow = &next_delta.data[b * in];
            for (std::size_t i = 0; i < out; ++i) {
                const double d = drow[i];
                if (d == 0.0) continue;
                const double* wrow = &layer.weight.data[i * in];
                double* gwrow = &gw.data[i * in];
                gb.data[i] += d;
                for (std::size_t j = 0; j < in; ++j) {
                    gwrow[j] += d * hrow[j];
                    nrow[j] += d * wrow[j];
                }
            }
        }
        if (li > 0) {
            const Tensor& z = preacts[li - 1];
            for (std::size_t i = 0; i < next_delta.data.size(); ++i) {
                next_delta.data[i] *= activate_grad(model.activation, z.data[i]);
            }
        }
        delta = std::move(next_delta);
    }

    // delta now holds the gradient wrt the joint input; keep the x slice
    grads.input_grad = Tensor::zeros({batch, model.input_dim});
    const std::size_t joint = model.joint_input_dim();
    for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t j = 0; j < model.input_dim; ++j) {
            grads.input_grad.at(b, j) = delta.data[b * joint + j];
        }
    }
    return grads;
}

ParamList collect_params(const MlpModel& model) {
    ParamList params;
    params.reserve(2 * model.layers.size());
    for (const Layer& layer : model.layers) {
        params.push_back(layer.weight);
        params.push_back(layer.bias);
    }
    return params;
}

void assign_params(MlpModel& model, const ParamList& params) {
    if (params.size() != 2 * model.layers.size()) {
        throw contract_error("assign_params: parameter list does not match model");
    }
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        require_same_shape(model.layers[l].weight, params[2 * l], "assign_params(weight)");
        require_same_shape(model.layers[l].bias, params[2 * l + 1], "assign_params(bias)");
        model.layers[l].weight = params[2 * l];
        model.layers[l].bias = params[2 * l + 1];
    }
}

ParamList zeros_like(const ParamList& params) {
    ParamList out;
    out.reserve(params.size());
    for (const Tensor& p : params) out.push_back(Tensor::zeros(p.shape));
    return out;
}

double param_dot(const ParamList& a, const ParamList& b) {
    if (a.size() != b.size()) throw contract_error("param_dot: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += dot(a[i], b[i]);
    return s;
}

double param_norm(const ParamList& a) {
    double s = 0.0;
    for (const Tensor& t : a) s += squared_norm(t);
    return std::sqrt(s);
}

void param_axpy(double alpha, const ParamList& x, ParamList& y) {
    if (x.size() != y.size()) throw contract_error("param_axpy: size mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) {
        require_same_shape(x[i], y[i], "param_axpy");
        for (std::size_t j = 0; j < x[i].data.size(); ++j) {
            y[i].data[j] += alpha * x[i].data[j];
        }
    }
}

bool params_all_finite(const ParamList& a) {
    for (const Tensor& t : a) {
        if (!t.all_finite()) return false;
    }
    return true;
}

std::uint64_t param_hash(const ParamList& params) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const Tensor& t : params) {
        for (double v : t.data) {
            std::uint64_t bits;
            std::memcpy(&bits, &v, sizeof(bits));
            for (int byte = 0; byte < 8; ++byte) {
                h ^= (bits >> (8 * byte)) & 0xffULL;
                h *= 0x100000001b3ULL;
            }
        }
    }
    return h;
}

}  // namespace gdmd::nn
