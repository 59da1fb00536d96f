#include "bbgen/capi.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <string>
#include <vector>

#include "bbgen/bb_generator.hpp"
#include "bbgen/error.hpp"
#include "bbgen/proi_generator.hpp"

namespace {

void copy_message(const char* what, char* err, size_t err_len) {
    if (err == nullptr || err_len == 0) return;
    const size_t n = std::min(std::strlen(what), err_len - 1);
    std::memcpy(err, what, n);
    err[n] = '\0';
}

template <class F>
int guarded(char* err, size_t err_len, F&& body) {
    try {
        body();
        copy_message("", err, err_len);
        return BBGEN_V1_OK;
    } catch (const bbgen::ParameterError& e) {
        copy_message(e.what(), err, err_len);
        return BBGEN_V1_PARAMETER_ERROR;
    } catch (const bbgen::DataError& e) {
        copy_message(e.what(), err, err_len);
        return BBGEN_V1_DATA_ERROR;
    } catch (const bbgen::GenerationFailure& e) {
        copy_message(e.what(), err, err_len);
        return BBGEN_V1_GENERATION_FAILURE;
    } catch (const bbgen::SamplingFailure& e) {
        copy_message(e.what(), err, err_len);
        return BBGEN_V1_GENERATION_FAILURE;
    } catch (const std::exception& e) {
        copy_message(e.what(), err, err_len);
        return BBGEN_V1_INTERNAL_ERROR;
    } catch (...) {
        copy_message("unknown error", err, err_len);
        return BBGEN_V1_INTERNAL_ERROR;
    }
}

}  // namespace

extern "C" {

const char* bbgen_v1_version(void) { return "1.0.0"; }

int bbgen_v1_generate_bb(const double* ref, double t, size_t count, uint64_t seed, double* boxes_out,
                         double* achieved_out, char* err, size_t err_len) {
    return guarded(err, err_len, [&] {
        if (ref == nullptr || (count > 0 && boxes_out == nullptr)) {
            throw bbgen::ParameterError("reference and output buffers must not be null");
        }
        const bbgen::Box reference(ref[0], ref[1], ref[2], ref[3]);
        const auto boxes = bbgen::generate_bb_batch(reference, t, count, seed);
        for (size_t i = 0; i < boxes.size(); ++i) {
            const auto c = boxes[i].box.coords();
            std::copy(c.begin(), c.end(), boxes_out + 4 * i);
            if (achieved_out) achieved_out[i] = boxes[i].record.achieved_iou;
        }
    });
}

int bbgen_v1_generate_proi(const double* gt_boxes, const int* category_ids, const int64_t* instance_ids, size_t n_gt,
                           const double* weights, size_t n_weights, size_t roi_num, uint64_t seed, int64_t image_id,
                           double* boxes_out, int* category_out, int64_t* instance_out, double* target_out,
                           double* achieved_out, char* err, size_t err_len) {
    return guarded(err, err_len, [&] {
        if ((n_gt > 0 && (gt_boxes == nullptr || category_ids == nullptr)) || weights == nullptr ||
            (roi_num > 0 && boxes_out == nullptr)) {
            throw bbgen::ParameterError("input and output buffers must not be null");
        }
        if (n_gt == 0) {
            throw bbgen::ParameterError("cannot allocate RoIs over an empty ground-truth set");
        }
        bbgen::GroundTruthSet gts;
        for (size_t i = 0; i < n_gt; ++i) {
            const double* b = gt_boxes + 4 * i;
            gts.push_back({bbgen::Box(b[0], b[1], b[2], b[3]), category_ids[i],
                           instance_ids ? instance_ids[i] : static_cast<int64_t>(i)});
        }
        bbgen::IoUDistributionSpec spec;
        spec.weights.assign(weights, weights + n_weights);
        const auto rois = bbgen::generate_proi_seeded(gts, spec, roi_num, seed, image_id);
        for (size_t i = 0; i < rois.size(); ++i) {
            const auto c = rois[i].box.coords();
            std::copy(c.begin(), c.end(), boxes_out + 4 * i);
            if (category_out) category_out[i] = rois[i].category_id;
            if (instance_out) instance_out[i] = rois[i].gt_instance_id;
            if (target_out) target_out[i] = rois[i].target_iou;
            if (achieved_out) achieved_out[i] = rois[i].achieved_iou;
        }
    });
}

}
