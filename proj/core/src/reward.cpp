#include "gdmd/reward.hpp"

#include "gdmd/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gdmd::reward {

RewardModel RewardModel::region_preference(Tensor centers, double sharpness) {
    if (centers.shape.size() != 2) {
        throw contract_error("region_preference: centers must be [n_conditions, dim]");
    }
    if (!(sharpness > 0.0)) throw contract_error("region_preference: sharpness must be positive");
    RewardModel r;
    r.kind = RewardKind::RegionPreference;
    r.centers = std::move(centers);
    r.sharpness = sharpness;
    return r;
}

RewardModel RewardModel::mode_correctness(std::shared_ptr<const teacher::GaussianMixture> ref) {
    if (!ref) throw contract_error("mode_correctness: null reference mixture");
    ref->validate();
    RewardModel r;
    r.kind = RewardKind::ModeCorrectness;
    r.reference = std::move(ref);
    return r;
}

RewardModel RewardModel::axis_preference(Tensor direction) {
    const double norm = std::sqrt(squared_norm(direction));
    if (!(std::abs(norm - 1.0) < 1e-9)) {
        throw contract_error("axis_preference: direction must be unit norm");
    }
    RewardModel r;
    r.kind = RewardKind::AxisPreference;
    r.direction = std::move(direction);
    return r;
}

RewardModel RewardModel::composite(std::vector<std::pair<RewardModel, double>> parts) {
    if (parts.empty()) throw contract_error("composite: needs at least one part");
    for (const auto& [part, weight] : parts) {
        (void)part;
        if (!(weight > 0.0)) throw contract_error("composite: weights must be positive");
    }
    RewardModel r;
    r.kind = RewardKind::Composite;
    r.parts = std::move(parts);
    return r;
}

Tensor decode(const Tensor& x) {
    return x;
}

std::vector<double> score_raw(const RewardModel& reward, const Tensor& x,
                              const std::vector<int>& cond) {
    if (x.shape.size() != 2 || x.rows() != cond.size()) {
        throw contract_error("score_raw: x must be [batch, dim] matching cond");
    }
    require_finite(x, "score_raw(x)");
    const std::size_t batch = x.rows();
    const std::size_t dim = x.cols();
    std::vector<double> scores(batch, 0.0);

    switch (reward.kind) {
        case RewardKind::RegionPreference: {
            if (reward.centers.cols() != dim) {
                throw contract_error("score_raw: region centers dim mismatch");
            }
            for (std::size_t b = 0; b < batch; ++b) {
                const int c = cond[b];
                if (c < 0 || static_cast<std::size_t>(c) >= reward.centers.rows()) {
                    throw contract_error("score_raw: unknown condition " + std::to_string(c));
                }
                double d2 = 0.0;
                for (std::size_t j = 0; j < dim; ++j) {
                    const double diff = x.at(b, j) - reward.centers.at(static_cast<std::size_t>(c), j);
                    d2 += diff * diff;
                }
                scores[b] = std::exp(-reward.sharpness * d2);
            }
            break;
        }
        case RewardKind::ModeCorrectness: {
            for (std::size_t b = 0; b < batch; ++b) {
                if (cond[b] < 0 || cond[b] >= reward.reference->n_conditions()) {
                    throw contract_error("score_raw: unknown condition " +
                                         std::to_string(cond[b]));
                }
                const std::size_t k = teacher::argmax_responsibility(*reward.reference,
                                                                     x.row_copy(b));
                scores[b] = reward.reference->components[k].label == cond[b] ? 1.0 : 0.0;
            }
            break;
        }
        case RewardKind::AxisPreference: {
            if (reward.direction.numel() != dim) {
                throw contract_error("score_raw: axis direction dim mismatch");
            }
            for (std::size_t b = 0; b < batch; ++b) {
                double s = 0.0;
                for (std::size_t j = 0; j < dim; ++j) s += reward.direction[j] * x.at(b, j);
                scores[b] = s;
            }
            break;
        }
        case RewardKind::Composite: {
            for (const auto& [part, weight] : reward.parts) {
                const std::vector<double> partial = score_raw(part, x, cond);
                for (std::size_t b = 0; b < batch; ++b) scores[b] += weight * partial[b];
            }
            break;
        }
    }
    return scores;
}

double normalize_reward(double r_raw_tar, double r_raw_x0, double z_c) {
    if (!(z_c > 0.0)) throw contract_error("normalize_reward: z_c must be positive");
    const double ratio = (r_raw_tar - r_raw_x0) / z_c;
    return 0.5 + 0.5 * std::clamp(ratio, -1.0, 1.0);
}

RewardNormalizer::RewardNormalizer(std::size_t n_conditions, double floor, double decay)
    : floor_(floor), decay_(decay), mean_(n_conditions, 0.0), second_moment_(n_conditions, 0.0) {
    if (n_conditions == 0) throw contract_error("RewardNormalizer: needs >= 1 condition");
    if (!(floor > 0.0)) throw contract_error("RewardNormalizer: floor must be positive");
    if (!(decay > 0.0 && decay < 1.0)) throw contract_error("RewardNormalizer: decay in (0,1)");
}

double RewardNormalizer::z(int cond) const {
    if (cond < 0 || static_cast<std::size_t>(cond) >= mean_.size()) {
        throw contract_error("RewardNormalizer::z: unknown condition " + std::to_string(cond));
    }
    const std::size_t c = static_cast<std::size_t>(cond);
    const double var = second_moment_[c] - mean_[c] * mean_[c];
    const double std_dev = var > 0.0 ? std::sqrt(var) : 0.0;
    return std::max(std_dev, floor_);
}

void RewardNormalizer::update(int cond, double diff) {
    if (cond < 0 || static_cast<std::size_t>(cond) >= mean_.size()) {
        throw contract_error("RewardNormalizer::update: unknown condition " +
                             std::to_string(cond));
    }
    if (!std::isfinite(diff)) {
        throw numeric_error("RewardNormalizer::update: non-finite diff");
    }
    const std::size_t c = static_cast<std::size_t>(cond);
    mean_[c] = decay_ * mean_[c] + (1.0 - decay_) * diff;
    second_moment_[c] = decay_ * second_moment_[c] + (1.0 - decay_) * diff * diff;
}

}  // namespace gdmd::reward
