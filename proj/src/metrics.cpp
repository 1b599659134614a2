#include "charanim/metrics.hpp"

#include <numeric>
#include <stdexcept>

namespace charanim {

uint64_t ConfusionMatrix::total() const {
    return std::accumulate(counts.begin(), counts.end(), uint64_t{0});
}

ConfusionMatrix confusion(const LabelMask& gt, const LabelMask& pred, size_t num_classes) {
    if (gt.width != pred.width || gt.height != pred.height)
        throw std::runtime_error("confusion: mask dimensions differ");
    ConfusionMatrix cm(num_classes);
    for (size_t i = 0; i < gt.labels.size(); ++i) {
        if (gt.labels[i] >= num_classes || pred.labels[i] >= num_classes)
            throw std::runtime_error("confusion: label outside taxonomy");
        cm.at(gt.labels[i], pred.labels[i])++;
    }
    return cm;
}

std::vector<ClassScore> per_class_scores(const ConfusionMatrix& cm) {
    std::vector<ClassScore> out;
    for (size_t c = 0; c < cm.k; ++c) {
        ClassScore s;
        s.class_id = c;
        uint64_t tp = cm.at(c, c);
        uint64_t fp = 0, fn = 0;
        for (size_t o = 0; o < cm.k; ++o) {
            if (o == c) continue;
            fn += cm.at(c, o);
            fp += cm.at(o, c);
        }
        s.gt_pixels = tp + fn;
        s.pred_pixels = tp + fp;
        s.recall = s.gt_pixels ? static_cast<double>(tp) / s.gt_pixels : 0.0;
        const uint64_t uni = tp + fp + fn;
        s.iou = uni ? static_cast<double>(tp) / uni : 0.0;
        out.push_back(s);
    }
    return out;
}

SegScores scores(const ConfusionMatrix& cm) {
    const uint64_t total = cm.total();
    if (total == 0) throw std::runtime_error("scores: empty confusion matrix");

    uint64_t trace = 0;
    for (size_t c = 0; c < cm.k; ++c) trace += cm.at(c, c);

    SegScores s;
    s.pixel_acc = static_cast<double>(trace) / total;

    double acc_sum = 0, iou_sum = 0;
    size_t acc_n = 0, iou_n = 0;
    for (const ClassScore& c : per_class_scores(cm)) {
        if (c.gt_pixels > 0) {
            acc_sum += c.recall;
            acc_n++;
        }
        if (c.gt_pixels > 0 || c.pred_pixels > 0) {
            iou_sum += c.iou;
            iou_n++;
        }
    }
    s.mean_acc = acc_n ? acc_sum / acc_n : 0.0;
    s.mean_iou = iou_n ? iou_sum / iou_n : 0.0;
    return s;
}

}  // namespace charanim
