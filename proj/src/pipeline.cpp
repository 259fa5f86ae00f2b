#include "mixkit/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include "mixkit/error.hpp"
#include "mixkit/png_io.hpp"

namespace mixkit {

namespace {

// Runs body(k) for k in [0, n) on up to `workers` threads. Work is handed out
// by index; if any call throws, remaining work is skipped and the exception
// with the lowest index is rethrown.
template <typename Body>
void parallel_for(std::size_t n, int workers, Body&& body) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  auto run = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= n || failed.load()) return;
      try {
        body(k);
      } catch (...) {
        errors[k] = std::current_exception();
        failed.store(true);
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), 1,
                                                      std::max<std::size_t>(n, 1));
  if (threads == 1) {
    run();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(run);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::string numbered(const char* prefix, std::size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%06zu.png", prefix, k);
  return buf;
}

// Path of `p` relative to `base`, falling back to absolute when no relative
// form exists.
std::string relative_to(const fs::path& p, const fs::path& base) {
  std::error_code ec;
  const fs::path rel = fs::relative(p, base, ec);
  if (ec || rel.empty()) return fs::absolute(p).lexically_normal().string();
  return rel.generic_string();
}

void require_nonempty(const DatasetIndex& index) {
  if (index.items.empty()) throw InvalidArgument("empty dataset");
}

void check_resolution(const DatasetIndex& index) {
  const PngInfo ref = read_png_info(index.items.front().resolved_image);
  for (const IndexItem& item : index.items) {
    const PngInfo i = read_png_info(item.resolved_image);
    if (i.width != ref.width || i.height != ref.height || i.channels != ref.channels) {
      throw InvalidArgument("resolution mismatch: " + item.image_path + " is " +
                            std::to_string(i.width) + "x" + std::to_string(i.height) + "x" +
                            std::to_string(i.channels) + ", expected " +
                            std::to_string(ref.width) + "x" + std::to_string(ref.height) + "x" +
                            std::to_string(ref.channels));
    }
  }
}

void check_heatmaps(const DatasetIndex& index, const MixConfig& cfg) {
  if (!cfg.needs_source_heatmap() && !cfg.needs_target_heatmap()) return;
  for (const IndexItem& item : index.items) {
    if (!item.resolved_heatmap) {
      throw InvalidArgument("missing heatmap for " + item.image_path + " (strategy " +
                            std::string(to_string(cfg.obtain)) + "/" +
                            std::string(to_string(cfg.paste_to)) + " needs saliency)");
    }
  }
}

std::optional<Heatmap> heatmap_for(const IndexItem& item, const Image& img, bool needed,
                                   bool upscale) {
  if (!needed) return std::nullopt;
  if (!item.resolved_heatmap) throw InvalidArgument("missing heatmap for " + item.image_path);
  Heatmap h = load_heatmap(*item.resolved_heatmap);
  if (upscale && (h.width() != img.width() || h.height() != img.height())) {
    h = upscale_nearest(h, img.width(), img.height());
  }
  return h;
}

void remove_quietly(const std::vector<fs::path>& paths) {
  std::error_code ec;
  for (const auto& p : paths) fs::remove(p, ec);
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
}

template <typename Record>
void write_jsonl(const fs::path& path, const std::vector<Record>& records) {
  std::string body;
  for (const Record& r : records) {
    body += nlohmann::json(r).dump();
    body += '\n';
  }
  write_file_atomic(path, body);
}

struct Accumulator {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;
  double min = 0.0;
  double max = 0.0;

  void add(double v) {
    ++n;
    if (n == 1) {
      min = max = v;
    } else {
      min = std::min(min, v);
      max = std::max(max, v);
    }
    const double d = v - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (v - mean);
  }

  Moments moments() const {
    if (n == 0) return {};
    return {mean, std::sqrt(m2 / static_cast<double>(n)), min, max};
  }
};

void moments_json(nlohmann::json& j, const Moments& m) {
  j = {{"mean", m.mean}, {"stddev", m.stddev}, {"min", m.min}, {"max", m.max}};
}

}  // namespace

DatasetIndex load_index(const fs::path& manifest_path, std::optional<int> class_count) {
  std::ifstream in(manifest_path);
  if (!in) throw IoError("cannot open manifest " + manifest_path.string());
  if (class_count && *class_count < 1) throw InvalidArgument("class count must be positive");

  DatasetIndex index;
  index.base_dir = manifest_path.parent_path();
  const std::string where = manifest_path.string() + ":";
  int max_class = -1;
  std::string line;
  for (int line_no = 1; std::getline(in, line); ++line_no) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;

    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, '\t');) fields.push_back(f);
    if (fields.size() < 2 || fields.size() > 3) {
      throw ManifestError(where + std::to_string(line_no) +
                          ": expected 2 or 3 tab-separated fields, got " +
                          std::to_string(fields.size()));
    }

    IndexItem item;
    item.image_path = fields[0];
    const std::string& cls = fields[1];
    const auto [ptr, ec] = std::from_chars(cls.data(), cls.data() + cls.size(), item.class_id);
    if (ec != std::errc() || ptr != cls.data() + cls.size() || item.class_id < 0) {
      throw ManifestError(where + std::to_string(line_no) + ": invalid class id '" + cls + "'");
    }
    if (class_count && item.class_id >= *class_count) {
      throw ManifestError(where + std::to_string(line_no) + ": class id " + cls +
                          " out of range [0, " + std::to_string(*class_count) + ")");
    }
    if (item.image_path.empty()) {
      throw ManifestError(where + std::to_string(line_no) + ": empty image path");
    }
    item.resolved_image = index.base_dir / item.image_path;
    if (!fs::is_regular_file(item.resolved_image)) {
      throw IoError(where + std::to_string(line_no) + ": image not found: " +
                    item.resolved_image.string());
    }
    if (fields.size() == 3 && !fields[2].empty()) {
      item.heatmap_path = fields[2];
      item.resolved_heatmap = index.base_dir / fields[2];
      if (!fs::is_regular_file(*item.resolved_heatmap)) {
        throw IoError(where + std::to_string(line_no) + ": heatmap not found: " +
                      item.resolved_heatmap->string());
      }
    }
    max_class = std::max(max_class, item.class_id);
    index.items.push_back(std::move(item));
  }
  index.class_count = class_count ? *class_count : max_class + 1;
  return index;
}

void to_json(nlohmann::json& j, const Region& r) {
  j = {{"x_l", r.x_l}, {"x_r", r.x_r}, {"y_b", r.y_b}, {"y_t", r.y_t}};
}

void from_json(const nlohmann::json& j, Region& r) {
  j.at("x_l").get_to(r.x_l);
  j.at("x_r").get_to(r.x_r);
  j.at("y_b").get_to(r.y_b);
  j.at("y_t").get_to(r.y_t);
}

void to_json(nlohmann::json& j, const MixedLabel& l) {
  j = nlohmann::json::array();
  for (const LabelEntry& e : l.entries()) {
    j.push_back({{"class_id", e.class_id}, {"weight", e.weight}});
  }
}

void from_json(const nlohmann::json& j, MixedLabel& l) {
  std::vector<LabelEntry> entries;
  for (const auto& e : j) entries.push_back({e.at("class_id").get<int>(), e.at("weight").get<double>()});
  l = MixedLabel(std::move(entries));
}

void to_json(nlohmann::json& j, const MixConfig& c) {
  j = {{"obtain", to_string(c.obtain)},
       {"paste_to", to_string(c.paste_to)},
       {"alpha", c.alpha},
       {"beta", c.beta}};
}

void from_json(const nlohmann::json& j, MixConfig& c) {
  const auto obtain = parse_obtain(j.at("obtain").get<std::string>());
  const auto paste_to = parse_paste_to(j.at("paste_to").get<std::string>());
  if (!obtain || !paste_to) throw InvalidArgument("unknown strategy in record");
  c.obtain = *obtain;
  c.paste_to = *paste_to;
  j.at("alpha").get_to(c.alpha);
  j.at("beta").get_to(c.beta);
}

void to_json(nlohmann::json& j, const MixRecord& r) {
  j = nlohmann::json{{"output_path", r.output_path},
                     {"source_path", r.source_path},
                     {"target_path", r.target_path},
                     {"strategy", r.strategy},
                     {"tau", nullptr},
                     {"lambda", r.lambda},
                     {"source_region", nullptr},
                     {"paste_region", r.paste_region},
                     {"label", r.label},
                     {"pair_seed", r.pair_seed}};
  if (r.tau) j["tau"] = *r.tau;
  if (r.source_region) j["source_region"] = *r.source_region;
}

void from_json(const nlohmann::json& j, MixRecord& r) {
  j.at("output_path").get_to(r.output_path);
  j.at("source_path").get_to(r.source_path);
  j.at("target_path").get_to(r.target_path);
  j.at("strategy").get_to(r.strategy);
  r.tau = j.at("tau").is_null() ? std::nullopt : std::optional<double>(j.at("tau").get<double>());
  j.at("lambda").get_to(r.lambda);
  r.source_region = j.at("source_region").is_null()
                        ? std::nullopt
                        : std::optional<Region>(j.at("source_region").get<Region>());
  j.at("paste_region").get_to(r.paste_region);
  j.at("label").get_to(r.label);
  j.at("pair_seed").get_to(r.pair_seed);
}

PairOutcome mix_pair(const DatasetIndex& index, const MixConfig& cfg, std::uint64_t pair_seed,
                     bool upscale_heatmaps) {
  require_nonempty(index);
  const auto last = static_cast<std::int64_t>(index.items.size()) - 1;
  Rng rng(pair_seed);
  PairOutcome out;
  out.pair_seed = pair_seed;
  out.source_index = static_cast<std::size_t>(rng.uniform_int(0, last));
  out.target_index = static_cast<std::size_t>(rng.uniform_int(0, last));
  const IndexItem& s = index.items[out.source_index];
  const IndexItem& t = index.items[out.target_index];

  const Image src = load_image(s.resolved_image);
  const Image tgt = load_image(t.resolved_image);
  const auto sh = heatmap_for(s, src, cfg.needs_source_heatmap(), upscale_heatmaps);
  const auto th = heatmap_for(t, tgt, cfg.needs_target_heatmap(), upscale_heatmaps);
  out.result = mix_matrix(src, tgt, MixedLabel::one_hot(s.class_id),
                          MixedLabel::one_hot(t.class_id), cfg, sh ? &*sh : nullptr,
                          th ? &*th : nullptr, rng);
  return out;
}

std::vector<MixRecord> run_batch(const DatasetIndex& index, const MixConfig& cfg,
                                 std::size_t n_outputs, std::uint64_t global_seed,
                                 const fs::path& out_dir, const BatchOptions& opts) {
  cfg.validate();
  require_nonempty(index);
  check_resolution(index);
  check_heatmaps(index, cfg);
  ensure_dir(out_dir);

  std::vector<MixRecord> records(n_outputs);
  std::vector<char> written(n_outputs, 0);
  try {
    parallel_for(n_outputs, opts.workers, [&](std::size_t k) {
      const std::uint64_t seed = derive_seed(global_seed, k);
      PairOutcome o = mix_pair(index, cfg, seed, opts.upscale_heatmaps);
      MixRecord& rec = records[k];
      rec.output_path = numbered("mix_", k);
      save_image(o.result.image, out_dir / rec.output_path);
      written[k] = 1;
      rec.source_path = relative_to(index.items[o.source_index].resolved_image, out_dir);
      rec.target_path = relative_to(index.items[o.target_index].resolved_image, out_dir);
      rec.strategy = cfg;
      rec.tau = o.result.tau;
      rec.lambda = o.result.lambda;
      rec.source_region = o.result.source_region;
      rec.paste_region = o.result.paste_region;
      rec.label = std::move(o.result.label);
      rec.pair_seed = seed;
    });
    write_jsonl(out_dir / "manifest.jsonl", records);
  } catch (...) {
    std::vector<fs::path> done;
    for (std::size_t k = 0; k < n_outputs; ++k) {
      if (written[k]) done.push_back(out_dir / numbered("mix_", k));
    }
    remove_quietly(done);
    throw;
  }
  return records;
}

StatsReport stats_report(const MixConfig& cfg, std::size_t n_samples, int img_w, int img_h,
                         std::uint64_t global_seed, const SaliencySets* src_sets,
                         const SaliencySets* tgt_sets) {
  cfg.validate();
  if (img_w < 1 || img_h < 1) throw InvalidArgument("image dimensions must be positive");

  StatsReport report;
  report.strategy = cfg;
  report.n_samples = n_samples;
  report.width = img_w;
  report.height = img_h;
  report.seed = global_seed;
  report.lambda_histogram.assign(kHistogramBins, 0);
  report.coverage_cols = std::min(kCoverageCells, img_w);
  report.coverage_rows = std::min(kCoverageCells, img_h);
  report.center_coverage.assign(
      static_cast<std::size_t>(report.coverage_cols) * report.coverage_rows, 0);
  report.expected_lambda = cfg.obtain == Obtain::resize_whole
                               ? (cfg.alpha * cfg.alpha + cfg.alpha * cfg.beta + cfg.beta * cfg.beta) / 3.0
                               : 0.5;

  Rng rng(global_seed);
  Accumulator lambda;
  Accumulator tau;
  for (std::size_t i = 0; i < n_samples; ++i) {
    const MixPlan plan = plan_mix(cfg, img_w, img_h, src_sets, tgt_sets, rng);
    const double l = plan.ratio.value();
    lambda.add(l);
    if (plan.tau) tau.add(*plan.tau);
    const int bin = std::min(kHistogramBins - 1, static_cast<int>(l * kHistogramBins));
    ++report.lambda_histogram[bin];
    const Region& r = plan.paste_region;
    const int cx = (r.x_l + r.x_r) / 2;
    const int cy = (r.y_b + r.y_t) / 2;
    const int col = static_cast<int>(std::int64_t{cx} * report.coverage_cols / img_w);
    const int row = static_cast<int>(std::int64_t{cy} * report.coverage_rows / img_h);
    ++report.center_coverage[static_cast<std::size_t>(row) * report.coverage_cols + col];
  }
  report.lambda = lambda.moments();
  if (cfg.obtain == Obtain::resize_whole) report.tau = tau.moments();
  return report;
}

void to_json(nlohmann::json& j, const StatsReport& r) {
  nlohmann::json lambda;
  moments_json(lambda, r.lambda);
  lambda["histogram"] = r.lambda_histogram;
  nlohmann::json tau = nullptr;
  if (r.tau) moments_json(tau, *r.tau);
  j = {{"strategy", r.strategy},
       {"n_samples", r.n_samples},
       {"width", r.width},
       {"height", r.height},
       {"seed", r.seed},
       {"lambda", lambda},
       {"tau", tau},
       {"expected_lambda", r.expected_lambda},
       {"center_coverage",
        {{"cols", r.coverage_cols}, {"rows", r.coverage_rows}, {"counts", r.center_coverage}}}};
}

void to_json(nlohmann::json& j, const HalfresRecord& r) {
  j = {{"split", r.split},
       {"mode", to_string(r.mode)},
       {"source_path", r.source_path},
       {"output_path", r.output_path},
       {"crop_region", nullptr},
       {"item_seed", r.item_seed}};
  if (r.crop_region) j["crop_region"] = *r.crop_region;
}

std::vector<HalfresRecord> run_halfres(const DatasetIndex& index, HalfresMode train_mode,
                                       HalfresMode val_mode, std::uint64_t global_seed,
                                       const fs::path& out_dir, int workers) {
  require_nonempty(index);
  ensure_dir(out_dir / "train");
  ensure_dir(out_dir / "val");

  const std::size_t n = index.items.size();
  std::vector<HalfresRecord> records(2 * n);
  std::vector<char> written(2 * n, 0);
  try {
    parallel_for(n, workers, [&](std::size_t k) {
      const IndexItem& item = index.items[k];
      const Image img = load_image(item.resolved_image);
      const std::uint64_t item_seed = derive_seed(global_seed, k);
      const struct {
        const char* split;
        HalfresMode mode;
      } splits[] = {{"train", train_mode}, {"val", val_mode}};
      for (std::size_t s = 0; s < 2; ++s) {
        Rng rng(derive_seed(item_seed, s));
        const HalfresResult res = halfres_apply(img, splits[s].mode, &rng);
        HalfresRecord& rec = records[2 * k + s];
        rec.split = splits[s].split;
        rec.mode = splits[s].mode;
        rec.output_path = std::string(splits[s].split) + "/" + numbered("", k);
        save_image(res.image, out_dir / rec.output_path);
        written[2 * k + s] = 1;
        rec.source_path = relative_to(item.resolved_image, out_dir);
        rec.crop_region = res.crop_region;
        rec.item_seed = item_seed;
      }
    });
    write_jsonl(out_dir / "manifest.jsonl", records);
  } catch (...) {
    std::vector<fs::path> done;
    for (std::size_t i = 0; i < 2 * n; ++i) {
      if (written[i]) done.push_back(out_dir / records[i].output_path);
    }
    remove_quietly(done);
    throw;
  }
  return records;
}

std::vector<fs::path> read_output_paths(const fs::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw IoError("cannot open manifest " + manifest_path.string());
  std::vector<fs::path> paths;
  std::string line;
  for (int line_no = 1; std::getline(in, line); ++line_no) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("output_path") ||
        !j["output_path"].is_string()) {
      throw ManifestError(manifest_path.string() + ":" + std::to_string(line_no) +
                          ": expected a JSON object with an output_path");
    }
    paths.push_back(manifest_path.parent_path() / j["output_path"].get<std::string>());
  }
  return paths;
}

Image contact_sheet(std::span<const Image> tiles, int rows, int cols) {
  constexpr int kGap = 2;
  if (rows < 1 || cols < 1) throw InvalidArgument("grid needs at least one row and column");
  const std::size_t needed = static_cast<std::size_t>(rows) * cols;
  if (tiles.size() < needed) {
    throw InvalidArgument("grid " + std::to_string(rows) + "x" + std::to_string(cols) + " needs " +
                          std::to_string(needed) + " images, manifest has " +
                          std::to_string(tiles.size()));
  }
  const Image& first = tiles.front();
  for (std::size_t i = 0; i < needed; ++i) {
    if (!tiles[i].same_shape(first)) {
      throw InvalidArgument("grid images differ in size: tile " + std::to_string(i) + " is " +
                            std::to_string(tiles[i].width()) + "x" +
                            std::to_string(tiles[i].height()));
    }
  }
  const int w = first.width();
  const int h = first.height();
  Image sheet(cols * w + (cols - 1) * kGap, rows * h + (rows - 1) * kGap, first.channels());
  for (std::size_t i = 0; i < needed; ++i) {
    const int col = static_cast<int>(i) % cols;
    const int row = static_cast<int>(i) / cols;
    const int x0 = col * (w + kGap);
    const int y0 = row * (h + kGap);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        for (int c = 0; c < first.channels(); ++c) sheet(x0 + x, y0 + y, c) = tiles[i](x, y, c);
      }
    }
  }
  return sheet;
}

}  // namespace mixkit
