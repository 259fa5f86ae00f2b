#include "mixkit/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "mixkit/error.hpp"
#include "mixkit/pipeline.hpp"
#include "mixkit/png_io.hpp"

namespace mixkit {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitContract = 3;

// Thrown for bad flag combinations detected after CLI11 parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StrategyFlags {
  std::string strategy = "resizemix";
  std::string obtain;
  std::string paste;
  double alpha = kDefaultAlpha;
  double beta = kDefaultBeta;

  void add_to(CLI::App& cmd, const std::vector<std::string>& names) {
    cmd.add_option("--strategy", strategy, "Mixing strategy")
        ->check(CLI::IsMember(names))
        ->capture_default_str();
    cmd.add_option("--obtain", obtain,
                   "Patch source for --strategy matrix: cut_random, cut_salient, "
                   "cut_non_salient, resize_whole");
    cmd.add_option("--paste", paste,
                   "Paste location for --strategy matrix: corresponding, random, salient, "
                   "non_salient");
    cmd.add_option("--alpha", alpha, "Lower bound of the resize scale rate")->capture_default_str();
    cmd.add_option("--beta", beta, "Upper bound of the resize scale rate")->capture_default_str();
  }

  MixConfig config() const {
    MixConfig cfg;
    cfg.alpha = alpha;
    cfg.beta = beta;
    if (strategy == "matrix") {
      if (obtain.empty() || paste.empty()) {
        throw UsageError("--strategy matrix needs both --obtain and --paste");
      }
      const auto o = parse_obtain(obtain);
      const auto p = parse_paste_to(paste);
      if (!o) throw UsageError("unknown --obtain value '" + obtain + "'");
      if (!p) throw UsageError("unknown --paste value '" + paste + "'");
      cfg.obtain = *o;
      cfg.paste_to = *p;
    } else {
      if (!obtain.empty() || !paste.empty()) {
        throw UsageError("--obtain/--paste only apply to --strategy matrix");
      }
      if (strategy == "cutmix") {
        cfg.obtain = Obtain::cut_random;
        cfg.paste_to = PasteTo::corresponding;
      } else {
        cfg.obtain = Obtain::resize_whole;
        cfg.paste_to = PasteTo::random;
      }
    }
    try {
      cfg.validate();
    } catch (const InvalidArgument& e) {
      throw UsageError(e.what());
    }
    return cfg;
  }
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  const char* env = std::getenv("MIXKIT_SEED");
  if (!env || !*env) return 0;
  std::uint64_t seed = 0;
  const char* end = env + std::char_traits<char>::length(env);
  const auto [ptr, ec] = std::from_chars(env, end, seed);
  if (ec != std::errc() || ptr != end) {
    throw UsageError(std::string("MIXKIT_SEED is not an unsigned integer: '") + env + "'");
  }
  return seed;
}

std::pair<int, int> parse_dims(const std::string& s) {
  const auto x = s.find('x');
  int w = 0;
  int h = 0;
  if (x != std::string::npos) {
    const auto r1 = std::from_chars(s.data(), s.data() + x, w);
    const auto r2 = std::from_chars(s.data() + x + 1, s.data() + s.size(), h);
    if (r1.ec == std::errc() && r1.ptr == s.data() + x && r2.ec == std::errc() &&
        r2.ptr == s.data() + s.size() && w > 0 && h > 0) {
      return {w, h};
    }
  }
  throw UsageError("--dims must look like 224x224, got '" + s + "'");
}

HalfresMode halfres_mode(const std::string& s, const char* flag) {
  const auto m = parse_halfres_mode(s);
  if (!m) throw UsageError(std::string(flag) + " must be rand_crop, resize or center_crop");
  return *m;
}

std::optional<Heatmap> maybe_heatmap(const std::string& path, int w, int h, bool upscale,
                                     const char* side) {
  if (path.empty()) return std::nullopt;
  Heatmap hm = load_heatmap(path);
  if (hm.width() != w || hm.height() != h) {
    if (!upscale) {
      throw InvalidArgument(std::string(side) + " heatmap " + path + " is " +
                            std::to_string(hm.width()) + "x" + std::to_string(hm.height()) +
                            ", image is " + std::to_string(w) + "x" + std::to_string(h) +
                            " (pass --upscale-heatmap to resample)");
    }
    hm = upscale_nearest(hm, w, h);
  }
  return hm;
}

nlohmann::json strategy_json(const std::string& name, const MixConfig& cfg) {
  nlohmann::json j = cfg;
  j["name"] = name;
  return j;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Image mixing augmentation toolkit"};
  app.name("mixkit");
  app.require_subcommand(1);

  // mix
  auto* mix = app.add_subcommand("mix", "Mix one source/target pair");
  StrategyFlags mix_flags;
  mix_flags.add_to(*mix, {"resizemix", "cutmix", "mixup", "matrix"});
  std::string src_path, tgt_path, mix_out, src_heatmap, tgt_heatmap;
  std::optional<double> mix_lambda;
  std::optional<std::uint64_t> mix_seed;
  int src_class = 0;
  int tgt_class = 1;
  bool mix_upscale = false;
  mix->add_option("source", src_path, "Source image (PNG)")->required();
  mix->add_option("target", tgt_path, "Target image (PNG)")->required();
  mix->add_option("-o,--output", mix_out, "Output PNG")->required();
  mix->add_option("--lambda", mix_lambda, "Blend ratio for --strategy mixup");
  mix->add_option("--seed", mix_seed, "Random seed (default: $MIXKIT_SEED or 0)");
  mix->add_option("--src-heatmap", src_heatmap, "Grayscale PNG heatmap of the source");
  mix->add_option("--tgt-heatmap", tgt_heatmap, "Grayscale PNG heatmap of the target");
  mix->add_option("--src-class", src_class, "Class id of the source")->capture_default_str();
  mix->add_option("--tgt-class", tgt_class, "Class id of the target")->capture_default_str();
  mix->add_flag("--upscale-heatmap", mix_upscale,
                "Nearest-neighbour resample heatmaps to the image size");

  // batch
  auto* batch = app.add_subcommand("batch", "Mix pairs drawn from a dataset manifest");
  StrategyFlags batch_flags;
  batch_flags.add_to(*batch, {"resizemix", "cutmix", "matrix"});
  std::string batch_manifest, batch_out;
  std::size_t batch_n = 0;
  std::optional<std::uint64_t> batch_seed;
  std::optional<int> batch_classes;
  int batch_workers = 1;
  bool batch_upscale = false;
  batch->add_option("--manifest", batch_manifest, "TSV dataset manifest")->required();
  batch->add_option("--out-dir", batch_out, "Output directory")->required();
  batch->add_option("--n", batch_n, "Number of mixed outputs")->required();
  batch->add_option("--seed", batch_seed, "Global seed (default: $MIXKIT_SEED or 0)");
  batch->add_option("--workers", batch_workers, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  batch->add_option("--classes", batch_classes, "Number of classes")->check(CLI::PositiveNumber);
  batch->add_flag("--upscale-heatmap", batch_upscale,
                  "Nearest-neighbour resample heatmaps to the image size");

  // halfres
  auto* halfres = app.add_subcommand("halfres", "Half-resolution train/val preprocessing");
  std::string hr_manifest, hr_out, hr_train = "resize", hr_val = "resize";
  std::optional<std::uint64_t> hr_seed;
  int hr_workers = 1;
  halfres->add_option("--manifest", hr_manifest, "TSV dataset manifest")->required();
  halfres->add_option("--out-dir", hr_out, "Output directory")->required();
  halfres->add_option("--train-mode", hr_train, "rand_crop, resize or center_crop")
      ->capture_default_str();
  halfres->add_option("--val-mode", hr_val, "rand_crop, resize or center_crop")
      ->capture_default_str();
  halfres->add_option("--seed", hr_seed, "Global seed (default: $MIXKIT_SEED or 0)");
  halfres->add_option("--workers", hr_workers, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  // stats
  auto* stats = app.add_subcommand("stats", "Simulate mixing geometry and report statistics");
  StrategyFlags stats_flags;
  stats_flags.add_to(*stats, {"resizemix", "cutmix", "matrix"});
  std::size_t stats_n = 100000;
  std::string stats_dims = "224x224", stats_src_heatmap, stats_tgt_heatmap;
  std::optional<std::uint64_t> stats_seed;
  bool stats_upscale = false;
  stats->add_option("--n", stats_n, "Number of draws")->capture_default_str();
  stats->add_option("--dims", stats_dims, "Image size WxH")->capture_default_str();
  stats->add_option("--seed", stats_seed, "Seed (default: $MIXKIT_SEED or 0)");
  stats->add_option("--src-heatmap", stats_src_heatmap, "Source heatmap for saliency strategies");
  stats->add_option("--tgt-heatmap", stats_tgt_heatmap, "Target heatmap for saliency strategies");
  stats->add_flag("--upscale-heatmap", stats_upscale,
                  "Nearest-neighbour resample heatmaps to --dims");

  // grid
  auto* grid = app.add_subcommand("grid", "Tile manifest outputs into a contact sheet");
  std::string grid_manifest, grid_out;
  int grid_rows = 1;
  int grid_cols = 1;
  grid->add_option("manifest", grid_manifest, "JSONL output manifest")->required();
  grid->add_option("--rows", grid_rows, "Rows")->check(CLI::PositiveNumber)->capture_default_str();
  grid->add_option("--cols", grid_cols, "Columns")->check(CLI::PositiveNumber)->capture_default_str();
  grid->add_option("-o,--output", grid_out, "Output PNG")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*mix) {
      const bool is_mixup = mix_flags.strategy == "mixup";
      MixConfig cfg;
      if (is_mixup) {
        if (!mix_lambda) throw UsageError("--strategy mixup needs --lambda");
        if (!(*mix_lambda >= 0.0 && *mix_lambda <= 1.0)) {
          throw UsageError("--lambda must lie in [0, 1]");
        }
      } else {
        if (mix_lambda) throw UsageError("--lambda only applies to --strategy mixup");
        cfg = mix_flags.config();
      }
      const std::uint64_t seed = resolve_seed(mix_seed);
      if (!is_mixup) {
        if (cfg.needs_source_heatmap() && src_heatmap.empty()) {
          err << "mixkit: missing source heatmap: --obtain " << to_string(cfg.obtain)
              << " needs --src-heatmap\n";
          return kExitContract;
        }
        if (cfg.needs_target_heatmap() && tgt_heatmap.empty()) {
          err << "mixkit: missing target heatmap: --paste " << to_string(cfg.paste_to)
              << " needs --tgt-heatmap\n";
          return kExitContract;
        }
      }

      const Image src = load_image(src_path);
      const Image tgt = load_image(tgt_path);
      if (!src.same_shape(tgt)) {
        throw InvalidArgument("source and target differ in size: " + std::to_string(src.width()) +
                              "x" + std::to_string(src.height()) + " vs " +
                              std::to_string(tgt.width()) + "x" + std::to_string(tgt.height()));
      }
      const auto l_s = MixedLabel::one_hot(src_class);
      const auto l_t = MixedLabel::one_hot(tgt_class);
      MixResult result;
      nlohmann::json strategy;
      if (is_mixup) {
        result = mixup(src, tgt, l_s, l_t, *mix_lambda);
        strategy = {{"name", "mixup"}};
      } else {
        const auto sh = cfg.needs_source_heatmap()
                            ? maybe_heatmap(src_heatmap, src.width(), src.height(), mix_upscale, "source")
                            : std::nullopt;
        const auto th = cfg.needs_target_heatmap()
                            ? maybe_heatmap(tgt_heatmap, tgt.width(), tgt.height(), mix_upscale, "target")
                            : std::nullopt;
        Rng rng(seed);
        result = mix_matrix(src, tgt, l_s, l_t, cfg, sh ? &*sh : nullptr, th ? &*th : nullptr, rng);
        strategy = strategy_json(mix_flags.strategy, cfg);
      }
      save_image(result.image, mix_out);

      MixRecord rec;
      rec.output_path = mix_out;
      rec.source_path = src_path;
      rec.target_path = tgt_path;
      rec.tau = result.tau;
      rec.lambda = result.lambda;
      rec.source_region = result.source_region;
      rec.paste_region = result.paste_region;
      rec.label = result.label;
      rec.pair_seed = seed;
      nlohmann::json j = rec;
      j["strategy"] = strategy;
      out << j.dump() << '\n';
      return kExitOk;
    }

    if (*batch) {
      const MixConfig cfg = batch_flags.config();
      const std::uint64_t seed = resolve_seed(batch_seed);
      const DatasetIndex index = load_index(batch_manifest, batch_classes);
      BatchOptions opts;
      opts.workers = batch_workers;
      opts.upscale_heatmaps = batch_upscale;
      const auto records = run_batch(index, cfg, batch_n, seed, batch_out, opts);
      out << nlohmann::json{{"outputs", records.size()},
                            {"manifest", (fs::path(batch_out) / "manifest.jsonl").string()},
                            {"seed", seed}}
                 .dump()
          << '\n';
      return kExitOk;
    }

    if (*halfres) {
      const HalfresMode train = halfres_mode(hr_train, "--train-mode");
      const HalfresMode val = halfres_mode(hr_val, "--val-mode");
      const std::uint64_t seed = resolve_seed(hr_seed);
      const DatasetIndex index = load_index(hr_manifest);
      const auto records = run_halfres(index, train, val, seed, hr_out, hr_workers);
      out << nlohmann::json{{"outputs", records.size()},
                            {"manifest", (fs::path(hr_out) / "manifest.jsonl").string()},
                            {"train_mode", to_string(train)},
                            {"val_mode", to_string(val)},
                            {"seed", seed}}
                 .dump()
          << '\n';
      return kExitOk;
    }

    if (*stats) {
      const MixConfig cfg = stats_flags.config();
      const auto [w, h] = parse_dims(stats_dims);
      const std::uint64_t seed = resolve_seed(stats_seed);
      if (cfg.needs_source_heatmap() && stats_src_heatmap.empty()) {
        err << "mixkit: missing source heatmap: --obtain " << to_string(cfg.obtain)
            << " needs --src-heatmap\n";
        return kExitContract;
      }
      if (cfg.needs_target_heatmap() && stats_tgt_heatmap.empty()) {
        err << "mixkit: missing target heatmap: --paste " << to_string(cfg.paste_to)
            << " needs --tgt-heatmap\n";
        return kExitContract;
      }
      std::optional<SaliencySets> ss, ts;
      if (cfg.needs_source_heatmap()) {
        ss = saliency_sets(*maybe_heatmap(stats_src_heatmap, w, h, stats_upscale, "source"));
      }
      if (cfg.needs_target_heatmap()) {
        ts = saliency_sets(*maybe_heatmap(stats_tgt_heatmap, w, h, stats_upscale, "target"));
      }
      const StatsReport report =
          stats_report(cfg, stats_n, w, h, seed, ss ? &*ss : nullptr, ts ? &*ts : nullptr);
      nlohmann::json j = report;
      j["strategy"]["name"] = stats_flags.strategy;
      out << j.dump() << '\n';
      return kExitOk;
    }

    if (*grid) {
      const auto paths = read_output_paths(grid_manifest);
      const std::size_t needed = static_cast<std::size_t>(grid_rows) * grid_cols;
      if (paths.size() < needed) {
        throw InvalidArgument("grid " + std::to_string(grid_rows) + "x" +
                              std::to_string(grid_cols) + " needs " + std::to_string(needed) +
                              " images, manifest has " + std::to_string(paths.size()));
      }
      std::vector<Image> tiles;
      tiles.reserve(needed);
      for (std::size_t i = 0; i < needed; ++i) tiles.push_back(load_image(paths[i]));
      save_image(contact_sheet(tiles, grid_rows, grid_cols), grid_out);
      out << nlohmann::json{{"output", grid_out}, {"rows", grid_rows}, {"cols", grid_cols}}.dump()
          << '\n';
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "mixkit: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "mixkit: " << e.what() << '\n';
    return kExitIo;
  } catch (const InvalidArgument& e) {
    err << "mixkit: " << e.what() << '\n';
    return kExitContract;
  } catch (const std::exception& e) {
    err << "mixkit: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitUsage;
}

}  // namespace mixkit
