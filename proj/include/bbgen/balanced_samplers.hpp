#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "bbgen/box.hpp"
#include "bbgen/error.hpp"
#include "bbgen/proi_generator.hpp"
#include "bbgen/rng.hpp"

namespace bbgen {

/// A positive RoI with a hardness score (a loss value, or any proxy for one).
struct LabeledRoI {
    Box box;
    int category_id = 0;
    double score = 0.0;
};

/// Online foreground-balanced weights: 1 / (C * k_c) per RoI, where C is the
/// number of categories present and k_c the count of the RoI's category.
inline std::vector<double> ofb_weights(const std::vector<LabeledRoI>& rois) {
    if (rois.empty()) {
        throw ParameterError("foreground-balanced weights need at least one RoI");
    }
    std::map<int, std::size_t> counts;
    for (const auto& roi : rois) {
        ++counts[roi.category_id];
    }
    const double categories = static_cast<double>(counts.size());
    std::vector<double> weights;
    weights.reserve(rois.size());
    for (const auto& roi : rois) {
        weights.push_back(1.0 / (categories * static_cast<double>(counts[roi.category_id])));
    }
    return weights;
}

/// Indices drawn from the foreground-balanced multinomial. Without
/// replacement, each draw renormalises over the RoIs still available.
inline std::vector<std::size_t> ofb_sample_indices(const std::vector<LabeledRoI>& rois, std::size_t n, SeededRng& rng,
                                                   bool with_replacement) {
    if (n == 0) {
        throw ParameterError("sample size must be at least 1");
    }
    if (!with_replacement && n > rois.size()) {
        throw ParameterError("cannot draw " + std::to_string(n) + " RoIs without replacement from " +
                             std::to_string(rois.size()));
    }
    std::vector<double> weights = ofb_weights(rois);
    std::vector<std::size_t> picked;
    picked.reserve(n);

    if (with_replacement) {
        std::vector<double> cumulative(weights.size());
        std::partial_sum(weights.begin(), weights.end(), cumulative.begin());
        const double total = cumulative.back();
        for (std::size_t k = 0; k < n; ++k) {
            const double u = rng.uniform01() * total;
            auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
            if (it == cumulative.end()) {
                --it;
            }
            picked.push_back(static_cast<std::size_t>(it - cumulative.begin()));
        }
        return picked;
    }

    double remaining = std::accumulate(weights.begin(), weights.end(), 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double u = rng.uniform01() * remaining;
        double cumulative = 0.0;
        std::size_t choice = weights.size();
        std::size_t last_available = weights.size();
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (weights[i] <= 0.0) {
                continue;
            }
            last_available = i;
            cumulative += weights[i];
            if (u < cumulative) {
                choice = i;
                break;
            }
        }
        if (choice == weights.size()) {
            choice = last_available;
        }
        picked.push_back(choice);
        remaining -= weights[choice];
        weights[choice] = 0.0;
    }
    return picked;
}

inline std::vector<LabeledRoI> ofb_sample(const std::vector<LabeledRoI>& rois, std::size_t n, SeededRng& rng,
                                          bool with_replacement = true) {
    std::vector<LabeledRoI> out;
    for (std::size_t i : ofb_sample_indices(rois, n, rng, with_replacement)) {
        out.push_back(rois[i]);
    }
    return out;
}

/// Greedy non-maximum suppression. Returns the indices of kept candidates in
/// descending score order; equal scores keep input order.
inline std::vector<std::size_t> nms_indices(const std::vector<LabeledRoI>& candidates, double iou_threshold) {
    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return candidates[a].score > candidates[b].score; });
    std::vector<std::size_t> kept;
    for (std::size_t idx : order) {
        const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](std::size_t k) {
            return iou(candidates[idx].box, candidates[k].box) >= iou_threshold;
        });
        if (!suppressed) {
            kept.push_back(idx);
        }
    }
    return kept;
}

inline std::vector<LabeledRoI> nms(const std::vector<LabeledRoI>& candidates, double iou_threshold) {
    std::vector<LabeledRoI> out;
    for (std::size_t i : nms_indices(candidates, iou_threshold)) {
        out.push_back(candidates[i]);
    }
    return out;
}

using HardnessScorer = std::function<double(const GeneratedRoI&)>;

/// Lower IoU with the ground truth counts as harder.
inline double default_hardness(const GeneratedRoI& roi) { return 1.0 - roi.achieved_iou; }

inline constexpr double kDefaultOhpmNmsIoU = 0.7;

/// Keeps up to `keep` of `pool` by score after NMS. `scores` aligns with `pool`.
inline std::vector<GeneratedRoI> ohpm_select_scored(const std::vector<GeneratedRoI>& pool,
                                                    const std::vector<double>& scores, std::size_t keep,
                                                    double nms_iou = kDefaultOhpmNmsIoU) {
    if (scores.size() != pool.size()) {
        throw ParameterError("got " + std::to_string(scores.size()) + " scores for a pool of " +
                             std::to_string(pool.size()));
    }
    std::vector<LabeledRoI> labeled;
    labeled.reserve(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (!std::isfinite(scores[i])) {
            throw ParameterError("hardness score #" + std::to_string(i) + " is not finite");
        }
        labeled.push_back({pool[i].box, pool[i].category_id, scores[i]});
    }
    std::vector<GeneratedRoI> out;
    for (std::size_t i : nms_indices(labeled, nms_iou)) {
        if (out.size() == keep) {
            break;
        }
        out.push_back(pool[i]);
    }
    return out;
}

/// Online hard positive mining: over-generate `pool_size` RoIs, score them,
/// suppress near-duplicates by score, and keep the `keep` hardest survivors.
inline std::vector<GeneratedRoI> ohpm_select(const GroundTruthSet& gts, const IoUDistributionSpec& spec,
                                             std::size_t pool_size, std::size_t keep, const HardnessScorer& scorer,
                                             SeededRng& rng, double nms_iou = kDefaultOhpmNmsIoU,
                                             const GenerationOptions& options = {}) {
    if (keep == 0 || pool_size < keep) {
        throw ParameterError("hard positive mining needs pool_size >= keep >= 1");
    }
    const auto pool = generate_proi(gts, spec, pool_size, rng, options);
    std::vector<double> scores;
    scores.reserve(pool.size());
    for (const auto& roi : pool) {
        scores.push_back(scorer(roi));
    }
    return ohpm_select_scored(pool, scores, keep, nms_iou);
}

}  // namespace bbgen
