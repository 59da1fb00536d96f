#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "bbgen/box.hpp"
#include "bbgen/error.hpp"
#include "bbgen/feasible_space.hpp"
#include "bbgen/polygon_sampler.hpp"
#include "bbgen/rng.hpp"

namespace bbgen {

/// Largest threshold the box generator accepts.
inline constexpr double kMaxThreshold = 0.999;

enum class Order { TopLeftFirst, BottomRightFirst };

inline const char* to_string(Order o) noexcept { return o == Order::TopLeftFirst ? "tl-first" : "br-first"; }

struct GenerationOptions {
    TraceOptions trace;
    ProposalDistribution proposal;
    /// Proposal budget per polygon sample.
    std::size_t attempt_budget = kDefaultAttemptBudget;
    /// Full redraws allowed when the re-checked IoU falls below the threshold.
    int verify_attempts = 5;
};

struct GenerationRecord {
    Box reference = Box::unit();
    double threshold = 0.0;
    Order order = Order::TopLeftFirst;
    double achieved_iou = 0.0;
    std::size_t proposals_used = 0;
    int attempts = 0;
};

struct GeneratedBox {
    Box box;
    GenerationRecord record;
};

namespace detail {

/// Last top-left polygon traced on the unit frame, per thread. Generating
/// many boxes at one threshold reuses it.
inline const FeasiblePolygon& unit_tl_polygon(double t, const TraceOptions& trace) {
    struct Entry {
        double t = -1.0;
        double step = 0.0;
        double tolerance = 0.0;
        FeasiblePolygon poly;
    };
    thread_local Entry cached;
    if (cached.t != t || cached.step != trace.step || cached.tolerance != trace.simplify_tolerance) {
        cached.poly = tl_feasible_polygon(Box::unit(), t, trace);
        cached.t = t;
        cached.step = trace.step;
        cached.tolerance = trace.simplify_tolerance;
    }
    return cached.poly;
}

}  // namespace detail

/// Draws one box whose IoU with `reference` is at least `t`.
///
/// The work happens on the unit box: sample a top-left corner from its
/// feasible polygon, then a bottom-right corner from the polygon induced by
/// that corner. A fair coin decides whether the result is reflected through
/// the box centre, which is the same as sampling the bottom-right corner
/// first. The box is mapped back to the reference frame and its IoU checked
/// again; a miss (possible only within the trace tolerance of the boundary)
/// triggers a redraw.
inline GeneratedBox generate_bb(const Box& reference, double t, SeededRng& rng, const GenerationOptions& options = {}) {
    if (!(t > 0.0 && t <= kMaxThreshold)) {
        throw ParameterError("IoU threshold must lie in (0, " + std::to_string(kMaxThreshold) + "], got " +
                             std::to_string(t));
    }
    const Box unit = Box::unit();
    const AffineMap to_unit = normalize_to(reference, unit);

    GenerationRecord record;
    record.reference = reference;
    record.threshold = t;
    record.order = rng.coin() ? Order::BottomRightFirst : Order::TopLeftFirst;

    const FeasiblePolygon& tl_poly = detail::unit_tl_polygon(t, options.trace);
    double last_iou = 0.0;
    for (int attempt = 1; attempt <= options.verify_attempts; ++attempt) {
        const PolygonSample tl = sample_polygon(tl_poly, options.proposal, rng, options.attempt_budget);
        const FeasiblePolygon br_poly = br_feasible_polygon(unit, t, tl.point, options.trace);
        const PolygonSample br = sample_polygon(br_poly, options.proposal, rng, options.attempt_budget);
        record.proposals_used += tl.proposals + br.proposals;
        record.attempts = attempt;

        Box candidate(tl.point, br.point);
        if (record.order == Order::BottomRightFirst) {
            candidate = reflect_about_center(candidate, unit);
        }
        const Box result = invert(to_unit, candidate);
        last_iou = iou(reference, result);
        if (last_iou >= t) {
            record.achieved_iou = last_iou;
            return {result, record};
        }
    }
    throw GenerationFailure("generated box missed IoU " + std::to_string(t) + " after " +
                            std::to_string(options.verify_attempts) + " attempts (last IoU " +
                            std::to_string(last_iou) + ")");
}

/// `count` boxes, each drawn from its own stream split off `SeededRng(seed)`.
inline std::vector<GeneratedBox> generate_bb_batch(const Box& reference, double t, std::size_t count,
                                                   std::uint64_t seed, const GenerationOptions& options = {}) {
    SeededRng root(seed);
    std::vector<GeneratedBox> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        SeededRng stream = root.split();
        out.push_back(generate_bb(reference, t, stream, options));
    }
    return out;
}

}  // namespace bbgen
