#include <algorithm>
#include <cmath>
#include <random>

#include "tsd/kitti.hpp"

namespace tsd {

namespace {

// Uniform in [0, 1) from the top 53 bits; std::uniform_real_distribution is
// implementation-defined, this is not.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

constexpr int kMaxJitterRetries = 16;

}  // namespace

std::vector<DetectionRecord> perturb_ground_truth(std::span<const DetectionRecord> records,
                                                  double jitter_px, double drop_rate,
                                                  std::uint64_t seed) {
  if (!(jitter_px >= 0.0) || !std::isfinite(jitter_px))
    throw ValidationError("jitter_px must be a finite value >= 0");
  if (!(drop_rate >= 0.0 && drop_rate < 1.0))
    throw ValidationError("drop_rate must lie in [0, 1)");

  std::mt19937_64 rng(seed);
  std::vector<DetectionRecord> out;
  out.reserve(records.size());
  for (const DetectionRecord& in : records) {
    // Jitter is drawn even for dropped records so that survivors see the same
    // noise for any drop_rate.
    const double drop_draw = unit_uniform(rng);
    double offsets[4] = {0, 0, 0, 0};
    BBox box = in.bbox;
    double magnitude = 0.0;
    if (jitter_px > 0.0) {
      bool accepted = false;
      for (int attempt = 0; attempt < kMaxJitterRetries && !accepted; ++attempt) {
        for (double& o : offsets) o = (2.0 * unit_uniform(rng) - 1.0) * jitter_px;
        const BBox candidate{in.bbox.left + offsets[0], in.bbox.top + offsets[1],
                             in.bbox.right + offsets[2], in.bbox.bottom + offsets[3]};
        if (candidate.valid()) {
          box = candidate;
          accepted = true;
        }
      }
      if (accepted) {
        for (double o : offsets) magnitude += std::fabs(o);
        magnitude /= 4.0;
      }
    }
    if (drop_draw < drop_rate) continue;

    DetectionRecord r = in;
    if (jitter_px > 0.0) {
      r.bbox = box;
      r.confidence = std::clamp(1.0 - magnitude / (2.0 * jitter_px), 0.5, 1.0);
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace tsd
