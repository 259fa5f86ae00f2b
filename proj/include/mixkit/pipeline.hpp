#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mixkit/mixers.hpp"

namespace mixkit {

namespace fs = std::filesystem;

struct IndexItem {
  std::string image_path;  // as written in the manifest
  int class_id = 0;
  std::optional<std::string> heatmap_path;
  fs::path resolved_image;
  std::optional<fs::path> resolved_heatmap;
};

struct DatasetIndex {
  fs::path base_dir;
  std::vector<IndexItem> items;
  int class_count = 0;
};

// Reads `image_path<TAB>class_id[<TAB>heatmap_path]` lines; paths are
// relative to the manifest's directory. Blank lines are skipped. Without an
// explicit class_count, it is one past the largest id seen.
DatasetIndex load_index(const fs::path& manifest_path,
                        std::optional<int> class_count = std::nullopt);

struct MixRecord {
  std::string output_path;
  std::string source_path;
  std::string target_path;
  MixConfig strategy;
  std::optional<double> tau;
  double lambda = 0.0;
  std::optional<Region> source_region;
  Region paste_region;
  MixedLabel label;
  std::uint64_t pair_seed = 0;

  friend bool operator==(const MixRecord&, const MixRecord&) = default;
};

void to_json(nlohmann::json& j, const Region& r);
void from_json(const nlohmann::json& j, Region& r);
void to_json(nlohmann::json& j, const MixedLabel& l);
void from_json(const nlohmann::json& j, MixedLabel& l);
void to_json(nlohmann::json& j, const MixConfig& c);
void from_json(const nlohmann::json& j, MixConfig& c);
void to_json(nlohmann::json& j, const MixRecord& r);
void from_json(const nlohmann::json& j, MixRecord& r);

struct BatchOptions {
  int workers = 1;
  bool upscale_heatmaps = false;
};

struct PairOutcome {
  MixResult result;
  std::size_t source_index = 0;
  std::size_t target_index = 0;
  std::uint64_t pair_seed = 0;
};

// One mixing event driven entirely by `pair_seed`: the pair is drawn
// uniformly with replacement (source, then target), then mixed.
PairOutcome mix_pair(const DatasetIndex& index, const MixConfig& cfg,
                     std::uint64_t pair_seed, bool upscale_heatmaps = false);

// Writes out_dir/mix_NNNNNN.png and out_dir/manifest.jsonl. Output k uses
// derive_seed(global_seed, k), so results do not depend on `workers`.
std::vector<MixRecord> run_batch(const DatasetIndex& index, const MixConfig& cfg,
                                 std::size_t n_outputs, std::uint64_t global_seed,
                                 const fs::path& out_dir, const BatchOptions& opts = {});

struct Moments {
  double mean = 0.0;
  double stddev = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct StatsReport {
  MixConfig strategy;
  std::size_t n_samples = 0;
  int width = 0;
  int height = 0;
  std::uint64_t seed = 0;
  Moments lambda;
  std::optional<Moments> tau;
  std::vector<std::int64_t> lambda_histogram;  // equal bins over [0, 1]
  int coverage_cols = 0;
  int coverage_rows = 0;
  std::vector<std::int64_t> center_coverage;  // paste-region centers, row-major cells
  double expected_lambda = 0.0;  // analytic E[lambda] before rounding
};

inline constexpr int kHistogramBins = 20;
inline constexpr int kCoverageCells = 8;

// Simulates mixing geometry only. Saliency strategies need the matching sets.
StatsReport stats_report(const MixConfig& cfg, std::size_t n_samples, int img_w, int img_h,
                         std::uint64_t global_seed, const SaliencySets* src_sets = nullptr,
                         const SaliencySets* tgt_sets = nullptr);

void to_json(nlohmann::json& j, const StatsReport& r);

struct HalfresRecord {
  std::string split;  // "train" or "val"
  HalfresMode mode = HalfresMode::resize;
  std::string source_path;
  std::string output_path;
  std::optional<Region> crop_region;
  std::uint64_t item_seed = 0;

  friend bool operator==(const HalfresRecord&, const HalfresRecord&) = default;
};

void to_json(nlohmann::json& j, const HalfresRecord& r);

// Writes out_dir/train/NNNNNN.png, out_dir/val/NNNNNN.png and
// out_dir/manifest.jsonl (train line then val line per item).
std::vector<HalfresRecord> run_halfres(const DatasetIndex& index, HalfresMode train_mode,
                                       HalfresMode val_mode, std::uint64_t global_seed,
                                       const fs::path& out_dir, int workers = 1);

// `output_path` of every line of a JSONL manifest, resolved against its directory.
std::vector<fs::path> read_output_paths(const fs::path& manifest_path);

// Tiles row-major with 2-pixel black separators. All tiles must share a shape.
Image contact_sheet(std::span<const Image> tiles, int rows, int cols);

}  // namespace mixkit
