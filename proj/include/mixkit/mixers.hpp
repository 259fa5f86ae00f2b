#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "mixkit/image.hpp"
#include "mixkit/region.hpp"
#include "mixkit/rng.hpp"

namespace mixkit {

struct LabelEntry {
  int class_id = 0;
  double weight = 0.0;
  friend bool operator==(const LabelEntry&, const LabelEntry&) = default;
};

// Sparse soft label. Entries are kept sorted by class id, same-class weights
// merged and zero weights dropped.
class MixedLabel {
 public:
  MixedLabel() = default;
  explicit MixedLabel(std::vector<LabelEntry> entries);

  static MixedLabel one_hot(int class_id) { return MixedLabel({{class_id, 1.0}}); }

  const std::vector<LabelEntry>& entries() const { return entries_; }
  double weight_of(int class_id) const;
  double total() const;

  friend bool operator==(const MixedLabel&, const MixedLabel&) = default;

 private:
  std::vector<LabelEntry> entries_;
};

// lambda * l_s + (1 - lambda) * l_t
MixedLabel mix_labels(const MixedLabel& l_s, const MixedLabel& l_t, double lambda);

// How the source patch is obtained.
enum class Obtain { cut_random, cut_salient, cut_non_salient, resize_whole };
// Where it goes in the target.
enum class PasteTo { corresponding, random, salient, non_salient };

std::string_view to_string(Obtain o);
std::string_view to_string(PasteTo p);
std::optional<Obtain> parse_obtain(std::string_view s);
std::optional<PasteTo> parse_paste_to(std::string_view s);

inline constexpr double kDefaultAlpha = 0.1;
inline constexpr double kDefaultBeta = 0.8;

// Cut modes draw the area ratio from U(0, 1) and use sides W*sqrt(r),
// H*sqrt(r); resize_whole draws the scale rate from U(alpha, beta).
struct MixConfig {
  Obtain obtain = Obtain::resize_whole;
  PasteTo paste_to = PasteTo::random;
  double alpha = kDefaultAlpha;
  double beta = kDefaultBeta;

  // Throws InvalidArgument on bad bounds or resize_whole + corresponding
  // with alpha < 1.
  void validate() const;
  bool needs_source_heatmap() const;
  bool needs_target_heatmap() const;

  friend bool operator==(const MixConfig&, const MixConfig&) = default;
};

// Exact mixing ratio as integers: patch area over image area.
struct AreaRatio {
  std::int64_t num = 0;
  std::int64_t den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const AreaRatio&, const AreaRatio&) = default;
};

// Pixel-free geometry of one mixing event.
struct MixPlan {
  double size_draw = 0.0;          // area ratio (cut) or tau (resize)
  std::optional<double> tau;       // resize_whole only
  int patch_w = 0;
  int patch_h = 0;
  std::optional<Region> source_region;  // cut modes only
  Region paste_region;
  AreaRatio ratio;
};

struct MixResult {
  Image image;
  MixedLabel label;
  std::optional<double> tau;
  double lambda = 0.0;
  std::optional<AreaRatio> ratio;  // absent for mixup
  std::optional<Region> source_region;
  Region paste_region;
};

Image paste(const Image& patch, const Image& target, const Region& r);

// Patch side lengths for an area ratio r: round(W*sqrt(r)) x round(H*sqrt(r)),
// clamped to [1, W] x [1, H].
std::pair<int, int> cut_patch_size(double area_ratio, int img_w, int img_h);
// round(tau*W) x round(tau*H), floored at one pixel.
std::pair<int, int> resize_patch_size(double tau, int img_w, int img_h);

// Draw order is fixed: size, then source center (cut modes), then target
// center (paste_to != corresponding). `forced_size` replaces the size draw.
MixPlan plan_mix(const MixConfig& cfg, int img_w, int img_h,
                 const SaliencySets* src_sets, const SaliencySets* tgt_sets,
                 Rng& rng, std::optional<double> forced_size = std::nullopt);

MixResult compose(const MixPlan& plan, const Image& src, const Image& tgt,
                  const MixedLabel& l_s, const MixedLabel& l_t);

MixResult cutmix(const Image& src, const Image& tgt, const MixedLabel& l_s,
                 const MixedLabel& l_t, Rng& rng);
MixResult cutmix_with_area(const Image& src, const Image& tgt, const MixedLabel& l_s,
                           const MixedLabel& l_t, double area_ratio, Rng& rng);

MixResult mix_matrix(const Image& src, const Image& tgt, const MixedLabel& l_s,
                     const MixedLabel& l_t, const MixConfig& cfg,
                     const Heatmap* src_heatmap, const Heatmap* tgt_heatmap, Rng& rng);

MixResult resizemix(const Image& src, const Image& tgt, const MixedLabel& l_s,
                    const MixedLabel& l_t, double alpha, double beta, Rng& rng);
MixResult resizemix_with_tau(const Image& src, const Image& tgt, const MixedLabel& l_s,
                             const MixedLabel& l_t, double tau, Rng& rng);

MixResult mixup(const Image& src, const Image& tgt, const MixedLabel& l_s,
                const MixedLabel& l_t, double lambda);

enum class HalfresMode { rand_crop, resize, center_crop };
std::string_view to_string(HalfresMode m);
std::optional<HalfresMode> parse_halfres_mode(std::string_view s);

struct HalfresResult {
  Image image;
  std::optional<Region> crop_region;  // crop modes only
};

// Output is floor(W/2) x floor(H/2). rand_crop draws x_l then y_b.
HalfresResult halfres_apply(const Image& img, HalfresMode mode, Rng* rng);
Image halfres_transform(const Image& img, HalfresMode mode, Rng* rng = nullptr);

}  // namespace mixkit
