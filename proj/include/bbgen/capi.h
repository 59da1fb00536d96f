/* Flat C interface for foreign-language hosts. Symbols carry a version
   prefix; a breaking change gets a new prefix rather than a new meaning. */
#ifndef BBGEN_CAPI_H
#define BBGEN_CAPI_H

#include <stddef.h>
#include <stdint.h>

#if defined(__GNUC__)
#define BBGEN_V1_API __attribute__((visibility("default")))
#else
#define BBGEN_V1_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

enum {
    BBGEN_V1_OK = 0,
    BBGEN_V1_PARAMETER_ERROR = 2,
    BBGEN_V1_DATA_ERROR = 3,
    BBGEN_V1_GENERATION_FAILURE = 4,
    BBGEN_V1_INTERNAL_ERROR = 5
};

BBGEN_V1_API const char* bbgen_v1_version(void);

/* `count` boxes around ref = {x1,y1,x2,y2} with IoU >= t.
   boxes_out holds count*4 doubles, achieved_out (nullable) count doubles.
   On failure the message is copied into err (nullable, NUL-terminated). */
BBGEN_V1_API int bbgen_v1_generate_bb(const double* ref, double t, size_t count, uint64_t seed, double* boxes_out,
                         double* achieved_out, char* err, size_t err_len);

/* Foreground-balanced positive RoIs for one image.
   gt_boxes: n_gt*4 doubles; category_ids: n_gt ints; instance_ids nullable
   (defaults to 0..n_gt-1). weights: five bin weights over bases
   0.5,0.6,0.7,0.8,0.9. Every output array holds roi_num entries (boxes
   roi_num*4); all but boxes_out are nullable. */
BBGEN_V1_API int bbgen_v1_generate_proi(const double* gt_boxes, const int* category_ids, const int64_t* instance_ids, size_t n_gt,
                           const double* weights, size_t n_weights, size_t roi_num, uint64_t seed, int64_t image_id,
                           double* boxes_out, int* category_out, int64_t* instance_out, double* target_out,
                           double* achieved_out, char* err, size_t err_len);

#ifdef __cplusplus
}
#endif

#endif
