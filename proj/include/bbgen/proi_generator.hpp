#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bbgen/bb_generator.hpp"
#include "bbgen/box.hpp"
#include "bbgen/error.hpp"
#include "bbgen/rng.hpp"

namespace bbgen {

struct GroundTruth {
    Box box;
    int category_id = 1;
    std::int64_t instance_id = 0;
};

using GroundTruthSet = std::vector<GroundTruth>;

/// Target-IoU law: bin bases `psi` with multinomial `weights`. Bin k spans
/// [psi[k], psi[k+1]); the last bin spans [psi.back(), clip_max].
struct IoUDistributionSpec {
    std::vector<double> psi{0.5, 0.6, 0.7, 0.8, 0.9};
    std::vector<double> weights;
    double clip_max = 0.95;

    void validate() const {
        if (psi.empty() || psi.size() != weights.size()) {
            throw ParameterError("IoU distribution needs one weight per bin base (" + std::to_string(psi.size()) +
                                 " bases, " + std::to_string(weights.size()) + " weights)");
        }
        for (std::size_t i = 0; i < psi.size(); ++i) {
            if (!(psi[i] > 0.0 && psi[i] < 1.0) || (i > 0 && !(psi[i] > psi[i - 1]))) {
                throw ParameterError("IoU bin bases must be strictly ascending inside (0, 1)");
            }
        }
        if (!(clip_max > psi.back() && clip_max <= kMaxThreshold)) {
            throw ParameterError("clip_max must exceed the last bin base and not exceed " +
                                 std::to_string(kMaxThreshold));
        }
        double sum = 0.0;
        for (double w : weights) {
            if (!(w >= 0.0) || !std::isfinite(w)) {
                throw ParameterError("IoU bin weights must be finite and non-negative");
            }
            sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-9) {
            throw ParameterError("IoU bin weights must sum to 1 (got " + std::to_string(sum) + ")");
        }
    }

    double bin_low(std::size_t k) const { return psi.at(k); }
    double bin_high(std::size_t k) const { return k + 1 < psi.size() ? psi[k + 1] : clip_max; }
};

struct IoUPreset {
    std::string_view name;
    /// Raw row weights over bins 0.5, 0.6, 0.7, 0.8, 0.9.
    std::array<double, 5> raw;
};

/// Named target-IoU laws. "balanced-0.5" carries the same weights as "balanced".
inline constexpr std::array<IoUPreset, 8> kIoUPresets{{
    {"right-skew", {0.02, 0.10, 0.20, 0.30, 0.38}},
    {"balanced", {0.33, 0.17, 0.18, 0.17, 0.15}},
    {"left-skew", {0.73, 0.12, 0.15, 0.05, 0.0}},
    {"balanced-0.5", {0.33, 0.17, 0.18, 0.17, 0.15}},
    {"balanced-0.6", {0.0, 0.38, 0.20, 0.22, 0.20}},
    {"balanced-0.7", {0.0, 0.0, 0.48, 0.25, 0.27}},
    {"balanced-0.8", {0.0, 0.0, 0.0, 0.64, 0.36}},
    {"balanced-0.9", {0.0, 0.0, 0.0, 0.0, 1.0}},
}};

/// Spec for a named preset. Raw weights are divided by their sum
/// ("left-skew" sums to 1.05 as given; every other row already sums to 1).
inline IoUDistributionSpec preset_spec(std::string_view name) {
    for (const auto& preset : kIoUPresets) {
        if (preset.name == name) {
            IoUDistributionSpec spec;
            const double sum = std::accumulate(preset.raw.begin(), preset.raw.end(), 0.0);
            spec.weights.clear();
            for (double w : preset.raw) {
                spec.weights.push_back(w / sum);
            }
            return spec;
        }
    }
    std::string known;
    for (const auto& preset : kIoUPresets) {
        known += (known.empty() ? "" : ", ") + std::string(preset.name);
    }
    throw ParameterError("unknown IoU preset '" + std::string(name) + "' (known: " + known + ")");
}

struct InstanceAllocation {
    std::size_t gt_index = 0;
    std::int64_t instance_id = 0;
    int category_id = 0;
    std::size_t count = 0;
};

/// RoI counts per ground truth, in input order.
struct AllocationPlan {
    std::vector<InstanceAllocation> instances;
    std::size_t roi_num = 0;

    std::map<int, std::size_t> per_category() const {
        std::map<int, std::size_t> totals;
        for (const auto& inst : instances) {
            totals[inst.category_id] += inst.count;
        }
        return totals;
    }
};

/// Splits `roi_num` equally over the categories present, then equally over
/// each category's instances. Remainders go one at a time to categories in
/// ascending id order, then to instances in input order.
inline AllocationPlan fg_balanced_roi_alloc(const GroundTruthSet& gts, std::size_t roi_num) {
    if (gts.empty()) {
        throw ParameterError("cannot allocate RoIs over an empty ground-truth set");
    }
    std::map<int, std::vector<std::size_t>> by_category;
    for (std::size_t i = 0; i < gts.size(); ++i) {
        by_category[gts[i].category_id].push_back(i);
    }

    AllocationPlan plan;
    plan.roi_num = roi_num;
    plan.instances.resize(gts.size());
    for (std::size_t i = 0; i < gts.size(); ++i) {
        plan.instances[i] = {i, gts[i].instance_id, gts[i].category_id, 0};
    }

    const std::size_t categories = by_category.size();
    const std::size_t base = roi_num / categories;
    std::size_t remainder = roi_num % categories;
    for (const auto& [category, members] : by_category) {
        std::size_t budget = base;
        if (remainder > 0) {
            ++budget;
            --remainder;
        }
        const std::size_t share = budget / members.size();
        std::size_t extra = budget % members.size();
        for (std::size_t idx : members) {
            plan.instances[idx].count = share + (extra > 0 ? 1 : 0);
            if (extra > 0) {
                --extra;
            }
        }
    }
    return plan;
}

/// One target IoU: a bin drawn from the weights, then a uniform value inside it.
inline double draw_target_iou(const IoUDistributionSpec& spec, SeededRng& rng) {
    const double u = rng.uniform01();
    double cumulative = 0.0;
    std::size_t bin = spec.weights.size() - 1;
    for (std::size_t k = 0; k < spec.weights.size(); ++k) {
        cumulative += spec.weights[k];
        if (u < cumulative) {
            bin = k;
            break;
        }
    }
    // Guard against the cumulative sum falling just short of 1 with a zero-weight tail.
    while (spec.weights[bin] == 0.0 && bin > 0) {
        --bin;
    }
    const double target = rng.uniform(spec.bin_low(bin), spec.bin_high(bin));
    return std::min(target, spec.clip_max);
}

struct TargetAssignment {
    std::size_t gt_index = 0;
    std::int64_t instance_id = 0;
    double target_iou = 0.0;
};

/// Draws one target per allocated slot, shuffles the whole batch of targets,
/// then pairs them with the slots (instances in plan order, each repeated
/// `count` times).
inline std::vector<TargetAssignment> assign_target_ious(const AllocationPlan& plan, const IoUDistributionSpec& spec,
                                                        SeededRng& rng) {
    spec.validate();
    std::size_t total = 0;
    for (const auto& inst : plan.instances) {
        total += inst.count;
    }
    std::vector<double> targets(total);
    for (double& t : targets) {
        t = draw_target_iou(spec, rng);
    }
    shuffle(targets, rng);

    std::vector<TargetAssignment> out;
    out.reserve(total);
    std::size_t next = 0;
    for (const auto& inst : plan.instances) {
        for (std::size_t k = 0; k < inst.count; ++k) {
            out.push_back({inst.gt_index, inst.instance_id, targets[next++]});
        }
    }
    return out;
}

struct GeneratedRoI {
    Box box;
    std::int64_t image_id = 0;
    std::int64_t gt_instance_id = 0;
    int category_id = 0;
    double target_iou = 0.0;
    double achieved_iou = 0.0;

    friend bool operator==(const GeneratedRoI&, const GeneratedRoI&) = default;
};

/// Generates one box per (instance, target) pair, each from its own stream
/// split off `rng` in slot order.
inline std::vector<GeneratedRoI> gen_rois(const GroundTruthSet& gts, const std::vector<TargetAssignment>& assignments,
                                          SeededRng& rng, const GenerationOptions& options = {}) {
    std::vector<GeneratedRoI> out;
    out.reserve(assignments.size());
    for (const auto& slot : assignments) {
        if (slot.gt_index >= gts.size()) {
            throw ParameterError("allocation refers to ground truth #" + std::to_string(slot.gt_index) +
                                 " but only " + std::to_string(gts.size()) + " were given");
        }
        const GroundTruth& gt = gts[slot.gt_index];
        SeededRng stream = rng.split();
        try {
            GeneratedBox g = generate_bb(gt.box, slot.target_iou, stream, options);
            out.push_back({g.box, 0, gt.instance_id, gt.category_id, slot.target_iou, g.record.achieved_iou});
        } catch (const Error& e) {
            throw GenerationFailure("ground truth instance " + std::to_string(gt.instance_id) + ": " + e.what());
        }
    }
    return out;
}

/// Allocation, target assignment and generation, in that order.
inline std::vector<GeneratedRoI> generate_proi(const GroundTruthSet& gts, const IoUDistributionSpec& spec,
                                               std::size_t roi_num, SeededRng& rng,
                                               const GenerationOptions& options = {}) {
    spec.validate();
    if (roi_num == 0) {
        return {};
    }
    const AllocationPlan plan = fg_balanced_roi_alloc(gts, roi_num);
    const auto assignments = assign_target_ious(plan, spec, rng);
    return gen_rois(gts, assignments, rng, options);
}

/// generate_proi on the stream keyed by `image_id` under `seed`; every
/// front end (CLI, C interface) goes through this to stay bit-identical.
inline std::vector<GeneratedRoI> generate_proi_seeded(const GroundTruthSet& gts, const IoUDistributionSpec& spec,
                                                      std::size_t roi_num, std::uint64_t seed, std::int64_t image_id = 0,
                                                      const GenerationOptions& options = {}) {
    SeededRng rng = SeededRng(seed).derive(static_cast<std::uint64_t>(image_id));
    auto rois = generate_proi(gts, spec, roi_num, rng, options);
    for (auto& roi : rois) {
        roi.image_id = image_id;
    }
    return rois;
}

}  // namespace bbgen
