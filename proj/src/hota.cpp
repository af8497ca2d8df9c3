#include "tsd/hota.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "tsd/assignment.hpp"
#include "tsd/simd/kernels.hpp"

namespace tsd {

std::vector<double> default_hota_alphas() {
  std::vector<double> a;
  for (int k = 1; k <= 19; ++k) a.push_back(k * 0.05);
  return a;
}

namespace {

struct FrameData {
  std::vector<int> gt_ids, pred_ids;
  std::vector<BBox> gt_boxes, pred_boxes;
  std::vector<double> iou;  // gt-major
};

}  // namespace

HotaReport hota(std::span<const LabeledBox> gt, std::span<const LabeledBox> pred,
                std::span<const double> alpha_values) {
  HotaReport report;
  report.alpha_values = alpha_values.empty() ? default_hota_alphas()
                                             : std::vector<double>(alpha_values.begin(), alpha_values.end());
  for (double a : report.alpha_values)
    if (!(a > 0.0 && a <= 1.0)) throw ValidationError("HOTA thresholds must lie in (0, 1]");

  if (gt.empty() && pred.empty()) {
    report.det_a = report.ass_a = report.loc_a = report.hota = 1.0;
    report.degenerate = true;
    for (double a : report.alpha_values) report.per_alpha.push_back({a, 1.0, 1.0, 1.0, 1.0, 0, 0, 0});
    return report;
  }

  std::map<int, FrameData> frames;
  std::map<int, long long> gt_count, pred_count;
  for (const LabeledBox& b : gt) {
    frames[b.frame_index].gt_ids.push_back(b.id);
    frames[b.frame_index].gt_boxes.push_back(b.box);
    ++gt_count[b.id];
  }
  for (const LabeledBox& b : pred) {
    frames[b.frame_index].pred_ids.push_back(b.id);
    frames[b.frame_index].pred_boxes.push_back(b.box);
    ++pred_count[b.id];
  }
  for (auto& [f, fd] : frames) {
    fd.iou.resize(fd.gt_boxes.size() * fd.pred_boxes.size());
    if (!fd.iou.empty()) simd::iou_matrix(fd.gt_boxes, simd::BoxColumns(fd.pred_boxes), fd.iou);
  }

  for (double alpha : report.alpha_values) {
    HotaAlphaScores s;
    s.alpha = alpha;
    std::map<std::pair<int, int>, long long> pair_hits;
    double iou_sum = 0.0;
    for (const auto& [f, fd] : frames) {
      const int n = static_cast<int>(fd.gt_ids.size()), m = static_cast<int>(fd.pred_ids.size());
      if (n == 0 || m == 0) continue;
      CostMatrix cost(n, m, 0.0);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) {
          const double v = fd.iou[static_cast<std::size_t>(i) * m + j];
          if (v >= alpha) cost.at(i, j) = -v;
        }
      const std::vector<int> match = solve_assignment(cost, TieBreak::Lexicographic);
      for (int i = 0; i < n; ++i) {
        const int j = match[i];
        if (j < 0) continue;
        const double v = fd.iou[static_cast<std::size_t>(i) * m + j];
        if (!(v >= alpha)) continue;
        ++s.tp;
        iou_sum += v;
        ++pair_hits[{fd.gt_ids[i], fd.pred_ids[j]}];
      }
    }
    s.fn = static_cast<long long>(gt.size()) - s.tp;
    s.fp = static_cast<long long>(pred.size()) - s.tp;
    s.det_a = static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fn + s.fp);
    if (s.tp > 0) {
      double acc = 0.0;
      for (const auto& [key, tpa] : pair_hits) {
        const long long denom = gt_count[key.first] + pred_count[key.second] - tpa;
        acc += static_cast<double>(tpa) * (static_cast<double>(tpa) / static_cast<double>(denom));
      }
      s.ass_a = acc / static_cast<double>(s.tp);
      s.loc_a = iou_sum / static_cast<double>(s.tp);
    }
    s.hota = std::sqrt(s.det_a * s.ass_a);
    report.per_alpha.push_back(s);
  }

  const double k = static_cast<double>(report.per_alpha.size());
  for (const HotaAlphaScores& s : report.per_alpha) {
    report.det_a += s.det_a;
    report.ass_a += s.ass_a;
    report.loc_a += s.loc_a;
    report.hota += s.hota;
  }
  report.det_a /= k;
  report.ass_a /= k;
  report.loc_a /= k;
  report.hota /= k;
  return report;
}

void write_hota_text(std::ostream& out, const HotaReport& r) {
  out << fmt::format("hota = {:.9f}\ndet_a = {:.9f}\nass_a = {:.9f}\nloc_a = {:.9f}\n", r.hota,
                     r.det_a, r.ass_a, r.loc_a);
  out << "degenerate = " << (r.degenerate ? "true" : "false") << "\n";
  out << "alpha_count = " << r.per_alpha.size() << "\n\n[per_alpha]\n";
  out << "alpha det_a ass_a loc_a hota tp fn fp\n";
  for (const HotaAlphaScores& s : r.per_alpha)
    out << fmt::format("{:.2f} {:.9f} {:.9f} {:.9f} {:.9f} {} {} {}\n", s.alpha, s.det_a, s.ass_a,
                       s.loc_a, s.hota, s.tp, s.fn, s.fp);
}

void write_hota_csv(std::ostream& out, const HotaReport& r) {
  out << "alpha,det_a,ass_a,loc_a,hota,tp,fn,fp\n";
  for (const HotaAlphaScores& s : r.per_alpha) {
    out << fmt::format("{:.2f},{:.9f},{:.9f},{:.9f},{:.9f},{},{},{}\n", s.alpha, s.det_a, s.ass_a,
                       s.loc_a, s.hota, s.tp, s.fn, s.fp);
  }
  out << fmt::format("mean,{:.9f},{:.9f},{:.9f},{:.9f},,,\n", r.det_a, r.ass_a, r.loc_a, r.hota);
}

}  // namespace tsd
