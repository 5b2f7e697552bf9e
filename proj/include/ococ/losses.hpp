#pragma once

#include <span>
#include <vector>

#include "ococ/common.hpp"

namespace ococ {

// Click in member-local index space of one sub-cloud.
struct LocalClick {
  int point;
  int cls;
};

// Pseudo labels for the unlabeled members of one sub-cloud. Labels are
// restricted to the sub-cloud's OCOC class set; weights are 1 - H/ln C with H
// the Shannon entropy of the full C-class prediction.
struct PseudoLabels {
  std::vector<int> point;  // member-local indices
  std::vector<int> label;
  std::vector<double> weight;
  std::size_t size() const { return point.size(); }
};

// The four loss terms with gradient contributions against per-point logits
// (fused through softmax) and scene logits.
struct LossBundle {
  double seg = 0.0, sl = 0.0, gmp = 0.0, pl = 0.0;
  double total = 0.0;
  std::vector<double> d_logits;  // n * C
  std::vector<double> d_scene;   // C
};

// Weighted cross-entropy over clicked points. `scale` multiplies value and
// gradient; the per-sub-cloud contract is scale = 1/|clicks| (batch callers
// pass 1/(clicked points in batch)). Returns the scaled value; gradients are
// accumulated into d_logits.
double loss_seg(std::span<const double> p, std::span<const double> logp, int n, int C,
                std::span<const LocalClick> clicks, std::span<const double> class_w, double scale,
                std::span<double> d_logits);

// Scene-level multi-label BCE on logits (softplus form). Gradient is
// sigmoid(g) - y, scaled.
double loss_sl(std::span<const double> scene_logits, std::span<const double> y, double scale,
               std::span<double> d_scene);

// BCE on the class-wise maximum point probability. Probabilities clamped to
// [kGmpEps, 1-kGmpEps]; gradient reaches only the argmax point per class
// (ties -> lowest index) and is zero where the clamp is active.
inline constexpr double kGmpEps = 1e-7;
double loss_gmp(std::span<const double> p, int n, int C, std::span<const double> y, double scale,
                std::span<double> d_logits);

// Pseudo labels for every member not listed in clicked_local; argmax is
// restricted to ococ_classes (ties -> smallest class id).
PseudoLabels make_pseudo_labels(std::span<const double> p, int n, int C,
                                std::span<const int> clicked_local,
                                std::span<const int> ococ_classes);

// Confidence-weighted cross-entropy on pseudo labels; labels and weights are
// constants (no gradient through argmax or entropy).
double loss_pl(std::span<const double> p, std::span<const double> logp, int n, int C,
               const PseudoLabels& pseudo, double scale, std::span<double> d_logits);

// Per-sub-cloud composite: seg normalized by its click count, pl by its
// unlabeled count, sl/gmp unscaled (their batch 1/K is the caller's job).
// When fixed_pseudo is non-null it is used instead of regenerating from p
// (finite-difference checks need the detached targets held constant).
LossBundle total_loss(std::span<const double> p, std::span<const double> logp,
                      std::span<const double> scene_logits, int n, int C,
                      std::span<const LocalClick> clicks, std::span<const double> y,
                      std::span<const double> class_w, bool enable_pl,
                      const PseudoLabels* fixed_pseudo = nullptr);

}  // namespace ococ
