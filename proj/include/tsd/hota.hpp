#pragma once

// Higher Order Tracking Accuracy: detection, association and localization
// accuracy averaged over IoU thresholds.

#include <iosfwd>
#include <span>
#include <vector>

#include "tsd/common.hpp"

namespace tsd {

struct LabeledBox {
  int frame_index = 0;
  int id = 0;
  BBox box;
};

struct HotaAlphaScores {
  double alpha = 0.0;
  double det_a = 0.0;
  double ass_a = 0.0;
  double loc_a = 0.0;
  double hota = 0.0;
  long long tp = 0, fn = 0, fp = 0;
};

struct HotaReport {
  double det_a = 0.0;
  double ass_a = 0.0;
  double loc_a = 0.0;
  double hota = 0.0;
  std::vector<double> alpha_values;
  std::vector<HotaAlphaScores> per_alpha;
  bool degenerate = false;  // no ground truth and no predictions
};

/// 0.05, 0.10, ..., 0.95.
std::vector<double> default_hota_alphas();

/// Per frame and threshold, GT and predicted boxes are matched one to one so
/// that the summed IoU is maximal, with pairs below the threshold excluded.
/// With no true positives AssA and LocA are 0. Empty GT and empty predictions
/// score 1 everywhere and set `degenerate`.
HotaReport hota(std::span<const LabeledBox> gt, std::span<const LabeledBox> pred,
                std::span<const double> alpha_values = {});

void write_hota_text(std::ostream& out, const HotaReport& report);
/// Columns: alpha,det_a,ass_a,loc_a,hota,tp,fn,fp; a final "mean" row leaves the counts empty.
void write_hota_csv(std::ostream& out, const HotaReport& report);

}  // namespace tsd
