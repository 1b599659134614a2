#pragma once

#include <cstdint>
#include <vector>

#include "charanim/taxonomy.hpp"

namespace charanim {

/// K x K pixel tally, rows = ground truth class, cols = predicted class.
struct ConfusionMatrix {
    size_t k = 0;
    std::vector<uint64_t> counts;  // row-major

    explicit ConfusionMatrix(size_t k_) : k(k_), counts(k_ * k_, 0) {}
    uint64_t& at(size_t gt, size_t pred) { return counts[gt * k + pred]; }
    uint64_t at(size_t gt, size_t pred) const { return counts[gt * k + pred]; }
    uint64_t total() const;
};

struct SegScores {
    double pixel_acc = 0;
    double mean_acc = 0;
    double mean_iou = 0;
};

ConfusionMatrix confusion(const LabelMask& gt, const LabelMask& pred, size_t num_classes);

/// pixel_acc = trace/total; mean_acc averages recall over classes present in
/// the ground truth; mean_iou averages IoU over classes present in either
/// mask. Classes absent from both are excluded from the means.
SegScores scores(const ConfusionMatrix& cm);

struct ClassScore {
    size_t class_id = 0;
    uint64_t gt_pixels = 0;
    uint64_t pred_pixels = 0;
    double recall = 0;  // TP / (TP + FN)
    double iou = 0;     // TP / (TP + FP + FN)
};

std::vector<ClassScore> per_class_scores(const ConfusionMatrix& cm);

}  // namespace charanim
