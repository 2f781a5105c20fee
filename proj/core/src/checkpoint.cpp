#include "gdmd/checkpoint.hpp"

#include "gdmd/error.hpp"

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace gdmd::nn {

namespace {

constexpr std::array<char, 8> kMagic = {'G', 'D', 'M', 'D', 'M', 'L', 'P', '1'};

void write_u32(std::ostream& out, std::uint32_t v) {
    std::array<unsigned char, 4> bytes{};
    for (int i = 0; i < 4; ++i) bytes[static_cast<std::size_t>(i)] = (v >> (8 * i)) & 0xff;
    out.write(reinterpret_cast<const char*>(bytes.data()), 4);
}

std::uint32_t read_u32(std::istream& in) {
    std::array<unsigned char, 4> bytes{};
    in.read(reinterpret_cast<char*>(bytes.data()), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[static_cast<std::size_t>(i)]) << (8 * i);
    return v;
}

void write_f64(std::ostream& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    std::array<unsigned char, 8> bytes{};
    for (int i = 0; i < 8; ++i) bytes[static_cast<std::size_t>(i)] = (bits >> (8 * i)) & 0xff;
    out.write(reinterpret_cast<const char*>(bytes.data()), 8);
}

double read_f64(std::istream& in) {
    std::array<unsigned char, 8> bytes{};
    in.read(reinterpret_cast<char*>(bytes.data()), 8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[static_cast<std::size_t>(i)]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const MlpModel& model) {
    model.validate();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw contract_error("save_checkpoint: cannot open " + path.string());

    out.write(kMagic.data(), kMagic.size());
    write_u32(out, static_cast<std::uint32_t>(model.input_dim));
    write_u32(out, static_cast<std::uint32_t>(model.cond_dim));
    write_u32(out, static_cast<std::uint32_t>(model.time_embed_dim));
    write_u32(out, static_cast<std::uint32_t>(model.output_dim));
    write_u32(out, model.activation == Activation::Tanh ? 0u : 1u);
    write_u32(out, static_cast<std::uint32_t>(model.layers.size()));
    for (const Layer& layer : model.layers) {
        write_u32(out, static_cast<std::uint32_t>(layer.weight.rows()));
        write_u32(out, static_cast<std::uint32_t>(layer.weight.cols()));
    }
    for (const Layer& layer : model.layers) {
        for (double v : layer.weight.data) write_f64(out, v);
        for (double v : layer.bias.data) write_f64(out, v);
    }
    if (!out) throw contract_error("save_checkpoint: write failed for " + path.string());
}

MlpModel load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw contract_error("load_checkpoint: cannot open " + path.string());

    std::array<char, 8> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kMagic) {
        throw contract_error("load_checkpoint: bad magic in " + path.string());
    }

    MlpModel model;
    model.input_dim = read_u32(in);
    model.cond_dim = read_u32(in);
    model.time_embed_dim = read_u32(in);
    model.output_dim = read_u32(in);
    model.activation = read_u32(in) == 0 ? Activation::Tanh : Activation::Silu;
    const std::uint32_t n_layers = read_u32(in);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> dims(n_layers);
    for (auto& d : dims) {
        d.first = read_u32(in);
        d.second = read_u32(in);
    }
    for (const auto& d : dims) {
        Layer layer;
        layer.weight = Tensor::zeros({d.first, d.second});
        layer.bias = Tensor::zeros({d.first});
        for (double& v : layer.weight.data) v = read_f64(in);
        for (double& v : layer.bias.data) v = read_f64(in);
        model.layers.push_back(std::move(layer));
    }
    if (!in) throw contract_error("load_checkpoint: truncated file " + path.string());
    model.validate();
    return model;
}

}  // namespace gdmd::nn
