#include "mixkit/mixers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mixkit/error.hpp"

namespace mixkit {

namespace {

void require_same_shape(const Image& src, const Image& tgt) {
  if (src.empty() || tgt.empty()) throw InvalidArgument("cannot mix an empty image");
  if (!src.same_shape(tgt)) {
    throw InvalidArgument("source " + std::to_string(src.width()) + "x" +
                          std::to_string(src.height()) + "x" + std::to_string(src.channels()) +
                          " and target " + std::to_string(tgt.width()) + "x" +
                          std::to_string(tgt.height()) + "x" + std::to_string(tgt.channels()) +
                          " differ in shape");
  }
}

CenterStrategy source_strategy(Obtain o) {
  switch (o) {
    case Obtain::cut_salient:
      return CenterStrategy::salient;
    case Obtain::cut_non_salient:
      return CenterStrategy::non_salient;
    default:
      return CenterStrategy::random;
  }
}

CenterStrategy target_strategy(PasteTo p) {
  switch (p) {
    case PasteTo::salient:
      return CenterStrategy::salient;
    case PasteTo::non_salient:
      return CenterStrategy::non_salient;
    default:
      return CenterStrategy::random;
  }
}

int round_side(double v, int limit) {
  return static_cast<int>(std::clamp<long>(std::lround(v), 1, limit));
}

const SaliencySets* sets_for(const Heatmap* h, const Image& img, bool needed,
                             std::optional<SaliencySets>& storage, const char* side) {
  if (!needed) return nullptr;
  if (!h) throw InvalidArgument(std::string("missing ") + side + " heatmap");
  if (h->width() != img.width() || h->height() != img.height()) {
    throw InvalidArgument(std::string(side) + " heatmap is " + std::to_string(h->width()) + "x" +
                          std::to_string(h->height()) + " but its image is " +
                          std::to_string(img.width()) + "x" + std::to_string(img.height()));
  }
  storage = saliency_sets(*h);
  return &*storage;
}

}  // namespace

MixedLabel::MixedLabel(std::vector<LabelEntry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const LabelEntry& a, const LabelEntry& b) { return a.class_id < b.class_id; });
  for (const LabelEntry& e : entries) {
    if (!std::isfinite(e.weight) || e.weight < 0.0) {
      throw InvalidArgument("label weight for class " + std::to_string(e.class_id) +
                            " must be finite and non-negative");
    }
    if (!entries_.empty() && entries_.back().class_id == e.class_id) {
      entries_.back().weight += e.weight;
    } else {
      entries_.push_back(e);
    }
  }
  std::erase_if(entries_, [](const LabelEntry& e) { return e.weight == 0.0; });
}

double MixedLabel::weight_of(int class_id) const {
  for (const LabelEntry& e : entries_) {
    if (e.class_id == class_id) return e.weight;
  }
  return 0.0;
}

double MixedLabel::total() const {
  double sum = 0.0;
  for (const LabelEntry& e : entries_) sum += e.weight;
  return sum;
}

MixedLabel mix_labels(const MixedLabel& l_s, const MixedLabel& l_t, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw InvalidArgument("mixing ratio must lie in [0, 1], got " + std::to_string(lambda));
  }
  const double rest = 1.0 - lambda;
  std::vector<LabelEntry> merged;
  merged.reserve(l_s.entries().size() + l_t.entries().size());
  for (const LabelEntry& e : l_s.entries()) merged.push_back({e.class_id, lambda * e.weight});
  for (const LabelEntry& e : l_t.entries()) merged.push_back({e.class_id, rest * e.weight});
  return MixedLabel(std::move(merged));
}

std::string_view to_string(Obtain o) {
  switch (o) {
    case Obtain::cut_random:
      return "cut_random";
    case Obtain::cut_salient:
      return "cut_salient";
    case Obtain::cut_non_salient:
      return "cut_non_salient";
    case Obtain::resize_whole:
      return "resize_whole";
  }
  return "?";
}

std::string_view to_string(PasteTo p) {
  switch (p) {
    case PasteTo::corresponding:
      return "corresponding";
    case PasteTo::random:
      return "random";
    case PasteTo::salient:
      return "salient";
    case PasteTo::non_salient:
      return "non_salient";
  }
  return "?";
}

std::optional<Obtain> parse_obtain(std::string_view s) {
  for (Obtain o : {Obtain::cut_random, Obtain::cut_salient, Obtain::cut_non_salient,
                   Obtain::resize_whole}) {
    if (to_string(o) == s) return o;
  }
  return std::nullopt;
}

std::optional<PasteTo> parse_paste_to(std::string_view s) {
  for (PasteTo p : {PasteTo::corresponding, PasteTo::random, PasteTo::salient,
                    PasteTo::non_salient}) {
    if (to_string(p) == s) return p;
  }
  return std::nullopt;
}

void MixConfig::validate() const {
  if (!(alpha > 0.0 && alpha <= beta && beta <= 1.0)) {
    throw InvalidArgument("scale bounds must satisfy 0 < alpha <= beta <= 1, got alpha=" +
                          std::to_string(alpha) + " beta=" + std::to_string(beta));
  }
  if (obtain == Obtain::resize_whole && paste_to == PasteTo::corresponding && alpha < 1.0) {
    throw InvalidArgument(
        "resize_whole cannot paste to the corresponding region: the resized patch and the "
        "source region differ in size unless alpha = beta = 1");
  }
}

bool MixConfig::needs_source_heatmap() const {
  return obtain == Obtain::cut_salient || obtain == Obtain::cut_non_salient;
}

bool MixConfig::needs_target_heatmap() const {
  return paste_to == PasteTo::salient || paste_to == PasteTo::non_salient;
}

Image paste(const Image& patch, const Image& target, const Region& r) {
  if (!r.inside(target.width(), target.height())) {
    throw InvalidArgument("paste region is not inside the target image");
  }
  if (patch.width() != r.width() || patch.height() != r.height()) {
    throw InvalidArgument("patch is " + std::to_string(patch.width()) + "x" +
                          std::to_string(patch.height()) + " but the paste region is " +
                          std::to_string(r.width()) + "x" + std::to_string(r.height()));
  }
  if (patch.channels() != target.channels()) {
    throw InvalidArgument("patch and target channel counts differ");
  }
  Image out = target;
  const int channels = target.channels();
  const std::size_t row_bytes = static_cast<std::size_t>(r.width()) * channels;
  const auto src = patch.data();
  auto dst = out.data();
  for (int j = 0; j < r.height(); ++j) {
    const std::size_t to = (static_cast<std::size_t>(r.y_b + j) * target.width() + r.x_l) * channels;
    std::copy_n(src.begin() + j * row_bytes, row_bytes, dst.begin() + to);
  }
  return out;
}

std::pair<int, int> cut_patch_size(double area_ratio, int img_w, int img_h) {
  const double side = std::sqrt(std::clamp(area_ratio, 0.0, 1.0));
  return {round_side(img_w * side, img_w), round_side(img_h * side, img_h)};
}

std::pair<int, int> resize_patch_size(double tau, int img_w, int img_h) {
  return {round_side(tau * img_w, img_w), round_side(tau * img_h, img_h)};
}

MixPlan plan_mix(const MixConfig& cfg, int img_w, int img_h, const SaliencySets* src_sets,
                 const SaliencySets* tgt_sets, Rng& rng, std::optional<double> forced_size) {
  if (forced_size) {
    if (!(*forced_size >= 0.0 && *forced_size <= 1.0)) {
      throw InvalidArgument("forced size draw must lie in [0, 1]");
    }
  } else {
    cfg.validate();
  }
  if (img_w < 1 || img_h < 1) throw InvalidArgument("image dimensions must be positive");
  if (cfg.needs_source_heatmap() && !src_sets) throw InvalidArgument("missing source heatmap");
  if (cfg.needs_target_heatmap() && !tgt_sets) throw InvalidArgument("missing target heatmap");

  MixPlan plan;
  if (cfg.obtain == Obtain::resize_whole) {
    plan.size_draw = forced_size ? *forced_size : rng.uniform(cfg.alpha, cfg.beta);
    plan.tau = plan.size_draw;
    std::tie(plan.patch_w, plan.patch_h) = resize_patch_size(plan.size_draw, img_w, img_h);
    if (plan.tau == 0.0) throw InvalidArgument("scale rate must be positive");
    if (cfg.paste_to == PasteTo::corresponding &&
        (plan.patch_w != img_w || plan.patch_h != img_h)) {
      throw InvalidArgument("resize_whole cannot paste to the corresponding region when tau < 1");
    }
  } else {
    plan.size_draw = forced_size ? *forced_size : rng.uniform_closed();
    std::tie(plan.patch_w, plan.patch_h) = cut_patch_size(plan.size_draw, img_w, img_h);
    plan.source_region = sample_region(source_strategy(cfg.obtain), plan.patch_w, plan.patch_h,
                                       src_sets, img_w, img_h, rng);
  }

  if (cfg.paste_to == PasteTo::corresponding) {
    plan.paste_region = plan.source_region ? *plan.source_region : Region::full(img_w, img_h);
  } else {
    plan.paste_region = sample_region(target_strategy(cfg.paste_to), plan.patch_w, plan.patch_h,
                                      tgt_sets, img_w, img_h, rng);
  }
  plan.ratio = {plan.paste_region.area(), std::int64_t{img_w} * img_h};
  return plan;
}

MixResult compose(const MixPlan& plan, const Image& src, const Image& tgt, const MixedLabel& l_s,
                  const MixedLabel& l_t) {
  require_same_shape(src, tgt);
  const Image patch = plan.source_region ? crop(src, *plan.source_region)
                                         : resize(src, plan.patch_w, plan.patch_h);
  MixResult out;
  out.image = paste(patch, tgt, plan.paste_region);
  out.tau = plan.tau;
  out.ratio = plan.ratio;
  out.lambda = plan.ratio.value();
  out.label = mix_labels(l_s, l_t, out.lambda);
  out.source_region = plan.source_region;
  out.paste_region = plan.paste_region;
  return out;
}

MixResult cutmix(const Image& src, const Image& tgt, const MixedLabel& l_s, const MixedLabel& l_t,
                 Rng& rng) {
  require_same_shape(src, tgt);
  const double area_ratio = rng.uniform_closed();
  return cutmix_with_area(src, tgt, l_s, l_t, area_ratio, rng);
}

MixResult cutmix_with_area(const Image& src, const Image& tgt, const MixedLabel& l_s,
                           const MixedLabel& l_t, double area_ratio, Rng& rng) {
  require_same_shape(src, tgt);
  const int w = src.width();
  const int h = src.height();
  const auto [patch_w, patch_h] = cut_patch_size(area_ratio, w, h);
  const Region r = sample_region(CenterStrategy::random, patch_w, patch_h, nullptr, w, h, rng);

  MixResult out;
  out.image = paste(crop(src, r), tgt, r);
  out.ratio = AreaRatio{r.area(), std::int64_t{w} * h};
  out.lambda = out.ratio->value();
  out.label = mix_labels(l_s, l_t, out.lambda);
  out.source_region = r;
  out.paste_region = r;
  return out;
}

MixResult mix_matrix(const Image& src, const Image& tgt, const MixedLabel& l_s,
                     const MixedLabel& l_t, const MixConfig& cfg, const Heatmap* src_heatmap,
                     const Heatmap* tgt_heatmap, Rng& rng) {
  require_same_shape(src, tgt);
  cfg.validate();
  std::optional<SaliencySets> src_sets;
  std::optional<SaliencySets> tgt_sets;
  const SaliencySets* s = sets_for(src_heatmap, src, cfg.needs_source_heatmap(), src_sets, "source");
  const SaliencySets* t = sets_for(tgt_heatmap, tgt, cfg.needs_target_heatmap(), tgt_sets, "target");
  return compose(plan_mix(cfg, src.width(), src.height(), s, t, rng), src, tgt, l_s, l_t);
}

MixResult resizemix(const Image& src, const Image& tgt, const MixedLabel& l_s,
                    const MixedLabel& l_t, double alpha, double beta, Rng& rng) {
  const MixConfig cfg{Obtain::resize_whole, PasteTo::random, alpha, beta};
  return mix_matrix(src, tgt, l_s, l_t, cfg, nullptr, nullptr, rng);
}

MixResult resizemix_with_tau(const Image& src, const Image& tgt, const MixedLabel& l_s,
                             const MixedLabel& l_t, double tau, Rng& rng) {
  require_same_shape(src, tgt);
  if (!(tau > 0.0 && tau <= 1.0)) throw InvalidArgument("scale rate must lie in (0, 1]");
  const MixConfig cfg{Obtain::resize_whole, PasteTo::random, tau, tau};
  return compose(plan_mix(cfg, src.width(), src.height(), nullptr, nullptr, rng, tau), src, tgt,
                 l_s, l_t);
}

MixResult mixup(const Image& src, const Image& tgt, const MixedLabel& l_s, const MixedLabel& l_t,
                double lambda) {
  require_same_shape(src, tgt);
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw InvalidArgument("mixup ratio must lie in [0, 1], got " + std::to_string(lambda));
  }
  Image out(src.width(), src.height(), src.channels());
  const auto a = src.data();
  const auto b = tgt.data();
  auto dst = out.data();
  const double rest = 1.0 - lambda;
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = static_cast<std::uint8_t>(std::floor(lambda * a[i] + rest * b[i] + 0.5));
  }
  MixResult result;
  result.image = std::move(out);
  result.lambda = lambda;
  result.label = mix_labels(l_s, l_t, lambda);
  result.paste_region = Region::full(src.width(), src.height());
  return result;
}

std::string_view to_string(HalfresMode m) {
  switch (m) {
    case HalfresMode::rand_crop:
      return "rand_crop";
    case HalfresMode::resize:
      return "resize";
    case HalfresMode::center_crop:
      return "center_crop";
  }
  return "?";
}

std::optional<HalfresMode> parse_halfres_mode(std::string_view s) {
  for (HalfresMode m : {HalfresMode::rand_crop, HalfresMode::resize, HalfresMode::center_crop}) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

HalfresResult halfres_apply(const Image& img, HalfresMode mode, Rng* rng) {
  if (img.width() < 2 || img.height() < 2) {
    throw InvalidArgument("half-resolution transform needs at least a 2x2 image, got " +
                          std::to_string(img.width()) + "x" + std::to_string(img.height()));
  }
  const int w = img.width() / 2;
  const int h = img.height() / 2;
  switch (mode) {
    case HalfresMode::resize:
      return {resize(img, w, h), std::nullopt};
    case HalfresMode::center_crop: {
      const Region r = center_crop_region(img.width(), img.height(), w, h);
      return {crop(img, r), r};
    }
    case HalfresMode::rand_crop: {
      if (!rng) throw InvalidArgument("rand_crop needs a random stream");
      const int x_l = static_cast<int>(rng->uniform_int(0, img.width() - w));
      const int y_b = static_cast<int>(rng->uniform_int(0, img.height() - h));
      const Region r{x_l, x_l + w, y_b, y_b + h};
      return {crop(img, r), r};
    }
  }
  throw InvalidArgument("unknown half-resolution mode");
}

Image halfres_transform(const Image& img, HalfresMode mode, Rng* rng) {
  return halfres_apply(img, mode, rng).image;
}

}  // namespace mixkit
