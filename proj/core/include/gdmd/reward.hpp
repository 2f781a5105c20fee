#pragma once

#include "gdmd/teacher.hpp"

#include <memory>
#include <utility>
#include <vector>

namespace gdmd::reward {

enum class RewardKind { RegionPreference, ModeCorrectness, AxisPreference, Composite };

/// Analytic reward function over data space. Immutable once built.
struct RewardModel {
    RewardKind kind = RewardKind::RegionPreference;

    // region preference: exp(-sharpness * ||x - center(cond)||^2)
    Tensor centers;  // [n_conditions, dim]
    double sharpness = 1.0;

    // mode correctness: 1 iff the most responsible reference component
    // carries the sample's condition label
    std::shared_ptr<const teacher::GaussianMixture> reference;

    // axis preference: direction . x
    Tensor direction;  // [dim], unit norm

    // composite: positively weighted sum of parts
    std::vector<std::pair<RewardModel, double>> parts;

    static RewardModel region_preference(Tensor centers, double sharpness);
    static RewardModel mode_correctness(std::shared_ptr<const teacher::GaussianMixture> ref);
    static RewardModel axis_preference(Tensor direction);
    static RewardModel composite(std::vector<std::pair<RewardModel, double>> parts);
};

/// Identity decoder standing in for a latent decoder at this scale.
Tensor decode(const Tensor& x);

/// Per-sample raw scores.
std::vector<double> score_raw(const RewardModel& reward, const Tensor& x,
                              const std::vector<int>& cond);

/// Optimality probability: 0.5 + 0.5 * clip((r_raw_tar - r_raw_x0)/z_c, -1, 1).
double normalize_reward(double r_raw_tar, double r_raw_x0, double z_c);

/// Per-condition EMA estimate of the reward-difference scale, floored.
class RewardNormalizer {
public:
    explicit RewardNormalizer(std::size_t n_conditions, double floor = 0.05,
                              double decay = 0.99);

    /// Z_c = max(EMA std of observed diffs, floor); always positive.
    double z(int cond) const;
    void update(int cond, double diff);

    double floor() const { return floor_; }
    std::size_t n_conditions() const { return mean_.size(); }

private:
    double floor_;
    double decay_;
    std::vector<double> mean_;
    std::vector<double> second_moment_;
};

}  // namespace gdmd::reward
