#include "relmap/pipeline.hpp"

#include "relmap/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace relmap {

using nlohmann::json;

std::string task_name(TaskKind t) {
    switch (t) {
        case TaskKind::Cancer: return "cancer";
        case TaskKind::Lymphocyte: return "lymphocyte";
        case TaskKind::Molecular: return "molecular";
        case TaskKind::Survival: return "survival";
        case TaskKind::Synthetic: return "synthetic";
    }
    return "?";
}

TaskKind task_from_name(const std::string& name) {
    if (name == "cancer") return TaskKind::Cancer;
    if (name == "lymphocyte") return TaskKind::Lymphocyte;
    if (name == "molecular") return TaskKind::Molecular;
    if (name == "survival") return TaskKind::Survival;
    if (name == "synthetic") return TaskKind::Synthetic;
    throw std::invalid_argument("unknown task: " + name);
}

namespace {

FeatureSpec make_feature(std::vector<DescriptorKind> parts, std::vector<ColorChannel> channels,
                         double scale, int grid_stride, int vocabulary) {
    FeatureSpec f;
    f.config.parts = std::move(parts);
    f.config.channels = std::move(channels);
    f.config.scale = scale;
    f.config.grid_stride = grid_stride;
    f.vocabulary = vocabulary;
    return f;
}

std::vector<double> molecular_c_grid() {
    std::vector<double> grid;
    for (int p = -2; p <= 2; ++p) grid.push_back(std::pow(10.0, p / 2.0));
    return grid;
}

std::vector<double> synthetic_c_grid() {
    std::vector<double> grid;
    for (int p = -2; p <= 2; ++p) grid.push_back(std::pow(4.0, p));
    return grid;
}

std::vector<double> nine_quantiles() {
    std::vector<double> q;
    for (int i = 1; i <= 9; ++i) q.push_back(i / 10.0);
    return q;
}

} // namespace

void apply_task_template(PipelineConfig& cfg) {
    using DK = DescriptorKind;
    using CC = ColorChannel;
    const std::vector<CC> red_blue = {CC::Red, CC::Blue};
    const std::vector<CC> rgb = {CC::Red, CC::Green, CC::Blue};

    switch (cfg.task) {
        case TaskKind::Cancer:
            // 3 BoW features (SIFT+gnq at 3 scales, red+blue), chi2 sum, C=1.
            cfg.tile_side = 102;
            cfg.tile_stride = 34;
            cfg.features = {
                make_feature({DK::Sift, DK::Gnq}, red_blue, 1.5, 3, 510),
                make_feature({DK::Sift, DK::Gnq}, red_blue, 2.0, 3, 510),
                make_feature({DK::Sift, DK::Gnq}, red_blue, 2.5, 3, 510),
            };
            cfg.kernel = KernelKind::Chi2;
            cfg.fixed_C = 1.0;
            cfg.q_grid = {0.5};
            break;
        case TaskKind::Lymphocyte:
            // 6 BoW features ({sift,gnq,ciq} x scales {1.5,2.0}, rgb), HIK sum, C=1.
            cfg.tile_side = 102;
            cfg.tile_stride = 34;
            cfg.features = {
                make_feature({DK::Sift}, rgb, 1.5, 3, 510),
                make_feature({DK::Sift}, rgb, 2.0, 3, 510),
                make_feature({DK::Gnq}, rgb, 1.5, 3, 384),
                make_feature({DK::Gnq}, rgb, 2.0, 3, 384),
                make_feature({DK::Ciq}, rgb, 1.5, 3, 384),
                make_feature({DK::Ciq}, rgb, 2.0, 3, 384),
            };
            cfg.kernel = KernelKind::Hik;
            cfg.fixed_C = 1.0;
            cfg.q_grid = {0.5};
            break;
        case TaskKind::Molecular:
            cfg.tile_side = 201;
            cfg.tile_stride = 67;
            cfg.features = {make_feature({DK::Sift}, red_blue, 2.0, 3, 510)};
            cfg.kernel = KernelKind::Hik;
            cfg.fixed_C = 0.0;
            cfg.c_grid = molecular_c_grid();
            cfg.outer_folds = 10;
            cfg.inner_folds = 9;
            cfg.q_grid = nine_quantiles();
            cfg.heatmaps = false;
            break;
        case TaskKind::Survival:
            cfg.tile_side = 201;
            cfg.tile_stride = 67;
            cfg.features = {make_feature({DK::Sift}, red_blue, 2.0, 3, 510)};
            cfg.kernel = KernelKind::Hik;
            cfg.fixed_C = 1.0;
            cfg.outer_folds = 10;
            cfg.q_grid = {0.5};
            cfg.heatmaps = false;
            break;
        case TaskKind::Synthetic:
            // Whole image as one tile; SIFT scale 2.0 sampled half a feature
            // radius apart; HIK; C from 5-fold CV over 4^n.
            cfg.tile_side = 300;
            cfg.tile_stride = 300;
            cfg.features = {make_feature({DK::Sift}, red_blue, 2.0, 6, 510)};
            cfg.kernel = KernelKind::Hik;
            cfg.fixed_C = 0.0;
            cfg.c_grid = synthetic_c_grid();
            cfg.select_folds = 5;
            cfg.q_grid = {0.5};
            cfg.quadrat_fraction = 50.0 / 300.0;
            break;
    }
    for (FeatureSpec& f : cfg.features) {
        // The kernel kind is shared across the summed BoW features.
        (void)f;
    }
}

namespace {

ColorChannel channel_from_json(const json& j) { return channel_from_name(j.get<std::string>()); }

FeatureSpec feature_from_json(const json& j) {
    FeatureSpec f;
    for (const auto& p : j.at("parts")) f.config.parts.push_back(kind_from_name(p.get<std::string>()));
    for (const auto& c : j.at("channels")) f.config.channels.push_back(channel_from_json(c));
    f.config.scale = j.value("scale", 2.0);
    f.config.grid_stride = j.value("grid_stride", 3);
    f.vocabulary = j.value("vocabulary", 510);
    return f;
}

json feature_to_json(const FeatureSpec& f) {
    json j;
    j["parts"] = json::array();
    for (DescriptorKind k : f.config.parts) j["parts"].push_back(kind_name(k));
    j["channels"] = json::array();
    for (ColorChannel c : f.config.channels) j["channels"].push_back(channel_name(c));
    j["scale"] = f.config.scale;
    j["grid_stride"] = f.config.grid_stride;
    j["vocabulary"] = f.vocabulary;
    return j;
}

} // namespace

PipelineConfig config_from_json_text(const std::string& text) {
    json j = json::parse(text);
    PipelineConfig cfg;
    cfg.task = task_from_name(j.at("task").get<std::string>());
    apply_task_template(cfg);

    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("images")) cfg.images_dir = j["images"].get<std::string>();
    if (j.contains("labels")) cfg.labels_csv = j["labels"].get<std::string>();
    if (j.contains("run_dir")) cfg.run_dir = j["run_dir"].get<std::string>();
    if (j.contains("tile_side")) cfg.tile_side = j["tile_side"].get<int>();
    if (j.contains("tile_stride")) cfg.tile_stride = j["tile_stride"].get<int>();
    if (j.contains("features")) {
        cfg.features.clear();
        for (const auto& f : j["features"]) cfg.features.push_back(feature_from_json(f));
    }
    if (j.contains("kernel")) cfg.kernel = kernel_kind_from_name(j["kernel"].get<std::string>());
    if (j.contains("bandwidth_convention")) {
        std::string b = j["bandwidth_convention"].get<std::string>();
        if (b == "inverse-mean") cfg.bandwidth = BandwidthConvention::InverseMeanDistance;
        else if (b == "mean") cfg.bandwidth = BandwidthConvention::MeanDistance;
        else throw std::invalid_argument("config: bandwidth_convention must be inverse-mean or mean");
    }
    if (j.contains("C")) cfg.fixed_C = j["C"].get<double>();
    if (j.contains("c_grid")) cfg.c_grid = j["c_grid"].get<std::vector<double>>();
    if (j.contains("outer_folds")) cfg.outer_folds = j["outer_folds"].get<int>();
    if (j.contains("inner_folds")) cfg.inner_folds = j["inner_folds"].get<int>();
    if (j.contains("select_folds")) cfg.select_folds = j["select_folds"].get<int>();
    if (j.contains("q_grid")) cfg.q_grid = j["q_grid"].get<std::vector<double>>();
    if (j.contains("codebook_image_fraction")) {
        cfg.codebook_image_fraction = j["codebook_image_fraction"].get<double>();
    }
    if (j.contains("codebook_feature_fraction")) {
        cfg.codebook_feature_fraction = j["codebook_feature_fraction"].get<double>();
    }
    if (j.contains("kmeans_max_iters")) cfg.kmeans_max_iters = j["kmeans_max_iters"].get<int>();
    if (j.contains("map_cutoff")) cfg.map_cutoff = j["map_cutoff"].get<int>();
    if (j.contains("heatmaps")) cfg.heatmaps = j["heatmaps"].get<bool>();
    if (j.contains("tile_normalization")) {
        std::string m = j["tile_normalization"].get<std::string>();
        if (m == "per-tile") cfg.tile_normalization = TileNormalization::PerTileThenGlobal;
        else if (m == "global") cfg.tile_normalization = TileNormalization::GlobalOnly;
        else throw std::invalid_argument("config: tile_normalization must be per-tile or global");
    }
    if (j.contains("heatmap_overlay_alpha")) {
        cfg.heatmap_overlay_alpha = j["heatmap_overlay_alpha"].get<double>();
    }
    if (j.contains("quadrat_threshold")) cfg.quadrat_threshold = j["quadrat_threshold"].get<double>();
    if (j.contains("quadrat_fraction")) cfg.quadrat_fraction = j["quadrat_fraction"].get<double>();
    if (j.contains("n_train")) cfg.n_train = j["n_train"].get<int>();
    if (j.contains("n_test")) cfg.n_test = j["n_test"].get<int>();
    if (j.contains("survival_cutoff")) cfg.survival_cutoff = j["survival_cutoff"].get<double>();
    return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config file not found: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return config_from_json_text(ss.str());
}

std::string resolved_config_text(const PipelineConfig& cfg) {
    json j;
    j["task"] = task_name(cfg.task);
    j["seed"] = cfg.seed;
    j["images"] = cfg.images_dir.string();
    j["labels"] = cfg.labels_csv.string();
    j["run_dir"] = cfg.run_dir.string();
    j["tile_side"] = cfg.tile_side;
    j["tile_stride"] = cfg.tile_stride;
    j["features"] = json::array();
    for (const FeatureSpec& f : cfg.features) j["features"].push_back(feature_to_json(f));
    j["kernel"] = kernel_kind_name(cfg.kernel);
    j["bandwidth_convention"] =
        cfg.bandwidth == BandwidthConvention::InverseMeanDistance ? "inverse-mean" : "mean";
    j["C"] = cfg.fixed_C;
    j["c_grid"] = cfg.c_grid;
    j["outer_folds"] = cfg.outer_folds;
    j["inner_folds"] = cfg.inner_folds;
    j["select_folds"] = cfg.select_folds;
    j["q_grid"] = cfg.q_grid;
    j["codebook_image_fraction"] = cfg.codebook_image_fraction;
    j["codebook_feature_fraction"] = cfg.codebook_feature_fraction;
    j["kmeans_max_iters"] = cfg.kmeans_max_iters;
    j["map_cutoff"] = cfg.map_cutoff;
    j["heatmaps"] = cfg.heatmaps;
    j["tile_normalization"] =
        cfg.tile_normalization == TileNormalization::PerTileThenGlobal ? "per-tile" : "global";
    j["heatmap_overlay_alpha"] = cfg.heatmap_overlay_alpha;
    j["quadrat_threshold"] = cfg.quadrat_threshold;
    j["quadrat_fraction"] = cfg.quadrat_fraction;
    j["n_train"] = cfg.n_train;
    j["n_test"] = cfg.n_test;
    j["survival_cutoff"] = cfg.survival_cutoff;
    return j.dump(2) + "\n";
}

void validate_config(const PipelineConfig& cfg) {
    if (cfg.features.empty()) throw std::invalid_argument("config: no features configured");
    if (cfg.tile_side < 1 || cfg.tile_stride < 1) {
        throw std::invalid_argument("config: tile side/stride must be >= 1");
    }
    for (const FeatureSpec& f : cfg.features) {
        if (f.vocabulary < 1) throw std::invalid_argument("config: vocabulary size must be >= 1");
        if (f.config.parts.empty() || f.config.channels.empty()) {
            throw std::invalid_argument("config: feature needs parts and channels");
        }
        if (2 * 6.0 * f.config.scale >= cfg.tile_side) {
            throw std::invalid_argument("config: feature radius does not fit in the tile");
        }
    }
    if (cfg.fixed_C <= 0.0 && cfg.c_grid.empty()) {
        throw std::invalid_argument("config: need C or c_grid");
    }
    if (cfg.q_grid.empty()) throw std::invalid_argument("config: empty quantile grid");
    if (cfg.task != TaskKind::Synthetic) {
        if (!std::filesystem::exists(cfg.images_dir)) {
            throw std::invalid_argument("config: images dir not found: " + cfg.images_dir.string());
        }
        if (!std::filesystem::exists(cfg.labels_csv)) {
            throw std::invalid_argument("config: labels csv not found: " + cfg.labels_csv.string());
        }
    } else {
        if (cfg.n_train < 2 || cfg.n_test < 2) {
            throw std::invalid_argument("config: synthetic task needs n_train and n_test >= 2");
        }
    }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

SampleTable load_table(const std::filesystem::path& images_dir,
                       const std::filesystem::path& labels_csv, bool survival) {
    std::ifstream in(labels_csv);
    if (!in) throw std::invalid_argument("cannot open labels csv: " + labels_csv.string());

    SampleTable table;
    std::map<std::string, std::size_t> seen; // id -> row number
    std::string line;
    std::size_t row = 0;
    bool header_checked = false;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (!header_checked) {
            header_checked = true;
            // Optional header row.
            try {
                (void)std::stod(cells.at(1));
            } catch (...) {
                continue;
            }
        }
        const std::size_t expected = survival ? 3 : 2;
        if (cells.size() < expected) {
            throw std::invalid_argument("labels csv row " + std::to_string(row) +
                                        ": expected at least " + std::to_string(expected) +
                                        " columns");
        }
        const std::string& id = cells[0];
        if (auto it = seen.find(id); it != seen.end()) {
            throw std::invalid_argument("labels csv: duplicate id '" + id + "' in rows " +
                                        std::to_string(it->second) + " and " + std::to_string(row));
        }
        seen[id] = row;
        double value = 0.0;
        try {
            value = std::stod(cells[1]);
        } catch (...) {
            throw std::invalid_argument("labels csv row " + std::to_string(row) +
                                        ": unparseable value '" + cells[1] + "'");
        }
        std::filesystem::path img = images_dir / (id + ".png");
        if (!std::filesystem::exists(img)) {
            throw std::invalid_argument("labels csv row " + std::to_string(row) +
                                        ": image not found: " + img.string());
        }
        table.ids.push_back(id);
        table.images.push_back(img);
        table.values.push_back(value);
        if (survival) {
            int c = 0;
            try {
                c = std::stoi(cells[2]);
            } catch (...) {
                throw std::invalid_argument("labels csv row " + std::to_string(row) +
                                            ": unparseable censored flag '" + cells[2] + "'");
            }
            table.censored.push_back(c != 0);
        }
    }
    if (table.ids.empty()) throw std::invalid_argument("labels csv: no samples");
    return table;
}

} // namespace

SampleTable load_labeled_dataset(const std::filesystem::path& images_dir,
                                 const std::filesystem::path& labels_csv) {
    return load_table(images_dir, labels_csv, false);
}

SampleTable load_survival_dataset(const std::filesystem::path& images_dir,
                                  const std::filesystem::path& labels_csv) {
    return load_table(images_dir, labels_csv, true);
}

namespace {

std::vector<Tile> tiles_for(const RasterImage& img, const PipelineConfig& cfg) {
    int side = std::min({cfg.tile_side, img.width(), img.height()});
    return tile_grid(img.width(), img.height(), side, cfg.tile_stride);
}

/// Contexts cached per distinct channel list.
struct ContextCache {
    const RasterImage& img;
    std::map<std::vector<ColorChannel>, ImageContext> cache;

    const ImageContext& get(const std::vector<ColorChannel>& channels) {
        auto it = cache.find(channels);
        if (it == cache.end()) {
            it = cache.emplace(channels, make_image_context(img, channels)).first;
        }
        return it->second;
    }
};

std::uint64_t fnv1a(const void* data, std::size_t bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < bytes; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Cache key over the kernel spec and the feature values it was built from.
std::uint64_t gram_cache_key(const KernelBase& base, const std::vector<BowVector>& features) {
    std::uint64_t h = fnv1a(&base.spec.kind, sizeof(base.spec.kind));
    h = fnv1a(&base.spec.beta, sizeof(double), h);
    for (const BowVector& bow : features) {
        h = fnv1a(bow.values.data(), bow.values.size() * sizeof(double), h);
    }
    return h;
}

} // namespace

void write_kernel_cache(const std::filesystem::path& path, const KernelBase& base,
                        const std::vector<BowVector>& features) {
    std::uint64_t key = gram_cache_key(base, features);
    std::FILE* f = std::fopen(path.string().c_str(), "wb");
    if (!f) throw std::runtime_error("cannot write gram cache: " + path.string());
    std::fwrite("RGRM", 1, 4, f);
    std::fwrite(&key, 8, 1, f);
    std::uint32_t n = static_cast<std::uint32_t>(base.n);
    std::fwrite(&n, 4, 1, f);
    std::fwrite(base.cache.data(), 8, base.cache.size(), f);
    std::fclose(f);
}

std::vector<Vocabulary> train_codebooks(const PipelineConfig& cfg,
                                        const std::vector<const RasterImage*>& images) {
    if (images.empty()) throw std::invalid_argument("train_codebooks: no images");
    Rng root(cfg.seed);

    std::vector<std::size_t> order(images.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng pick = root.substream("codebook-images", 0);
    pick.shuffle(order);
    std::size_t n_used = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(cfg.codebook_image_fraction * images.size())));
    n_used = std::min(n_used, images.size());
    order.resize(n_used);
    std::sort(order.begin(), order.end()); // deterministic extraction order

    std::vector<DescriptorSet> samples(cfg.features.size());
    for (std::size_t u = 0; u < cfg.features.size(); ++u) {
        samples[u].kind = cfg.features[u].config.name();
        samples[u].dim = cfg.features[u].config.dimension();
    }

    for (std::size_t idx : order) {
        const RasterImage& img = *images[idx];
        ContextCache ctx{img, {}};
        auto tiles = tiles_for(img, cfg);
        Rng keep = root.substream("codebook-feats", idx);
        for (std::size_t u = 0; u < cfg.features.size(); ++u) {
            const FeatureConfig& fc = cfg.features[u].config;
            const ImageContext& ic = ctx.get(fc.channels);
            for (const Tile& tile : tiles) {
                DescriptorSet set = extract_tile_descriptors(ic, fc, tile);
                for (std::size_t i = 0; i < set.count(); ++i) {
                    if (keep.uniform() < cfg.codebook_feature_fraction) {
                        samples[u].append(set.keypoints[i], set.row(i));
                    }
                }
            }
        }
    }

    std::vector<Vocabulary> vocabs(cfg.features.size());
    for (std::size_t u = 0; u < cfg.features.size(); ++u) {
        const FeatureSpec& fs = cfg.features[u];
        MetricWeights metric = fs.config.parts.size() > 1
                                   ? compute_metric_weights(samples[u], fs.config.block_dims())
                                   : unit_metric_weights(samples[u].dim);
        KmeansOptions opts;
        opts.max_iters = cfg.kmeans_max_iters;
        opts.seed = derive_seed(cfg.seed, "kmeans", u);
        vocabs[u] = kmeans_train(samples[u], metric, fs.vocabulary, opts);
    }
    return vocabs;
}

EncodedImage encode_image(const RasterImage& img, const PipelineConfig& cfg,
                          const std::vector<Vocabulary>& vocabs) {
    if (vocabs.size() != cfg.features.size()) {
        throw std::invalid_argument("encode_image: vocabulary count mismatch");
    }
    EncodedImage enc;
    enc.tiles = tiles_for(img, cfg);
    const std::size_t n_feat = cfg.features.size();
    enc.tile_bows.resize(n_feat);
    enc.tile_mappings.resize(n_feat);
    enc.tile_keypoints.resize(n_feat);
    enc.image_bow.resize(n_feat);

    ContextCache ctx{img, {}};
    for (std::size_t u = 0; u < n_feat; ++u) {
        const FeatureConfig& fc = cfg.features[u].config;
        const ImageContext& ic = ctx.get(fc.channels);
        enc.tile_bows[u].resize(enc.tiles.size());
        enc.tile_mappings[u].resize(enc.tiles.size());
        enc.tile_keypoints[u].resize(enc.tiles.size());
        for (std::size_t t = 0; t < enc.tiles.size(); ++t) {
            DescriptorSet set = extract_tile_descriptors(ic, fc, enc.tiles[t]);
            enc.tile_keypoints[u][t] = set.keypoints;
            enc.tile_mappings[u][t] = rank_soft_map_all(set, vocabs[u], cfg.map_cutoff);
            enc.tile_bows[u][t] = bow_from_tile(enc.tile_mappings[u][t], vocabs[u].k);
        }
        enc.image_bow[u] = average_bow(enc.tile_bows[u]);
    }
    return enc;
}

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string fmt_p(const TestResult& t) {
    if (t.p > 0.0) return fmt(t.p);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "<1e%.0f", std::ceil(t.log10_p));
    return buf;
}

std::ofstream open_report(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write report: " + path.string());
    return out;
}

struct RunDirs {
    std::filesystem::path root, vocab, grams, models, reports, heatmaps;
};

RunDirs make_run_dirs(const PipelineConfig& cfg) {
    RunDirs d;
    d.root = cfg.run_dir;
    d.vocab = d.root / "vocab";
    d.grams = d.root / "grams";
    d.models = d.root / "models";
    d.reports = d.root / "reports";
    d.heatmaps = d.root / "heatmaps";
    for (const auto& p : {d.root, d.vocab, d.grams, d.models, d.reports, d.heatmaps}) {
        std::filesystem::create_directories(p);
    }
    std::ofstream(d.root / "config.resolved") << resolved_config_text(cfg);
    return d;
}



/// Signed relevance plane shifted by the pixel threshold; a quadrat then
/// counts as molecular signal when its thresholded relevance sums positive.
Plane threshold_shift(const Plane& hm, double thr) {
    Plane out = hm;
    if (thr != 0.0) {
        for (float& v : out.values) v -= static_cast<float>(thr);
    }
    return out;
}

/// Heatmap of a whole image from image-level dimension relevance: spreads
/// relevance to tiles along the BoW average, redistributes per tile onto
/// local features and accumulates pixel scores.
Plane image_heatmap(const EncodedImage& enc, int width, int height,
                    const DimensionRelevance& rel, TileNormalization mode) {
    std::vector<TileRelevance> tiles(enc.tiles.size());
    for (std::size_t t = 0; t < enc.tiles.size(); ++t) tiles[t].tile = enc.tiles[t];

    for (std::size_t u = 0; u < rel.r.size(); ++u) {
        auto per_tile = spread_to_tiles(rel.r[u], enc.image_bow[u], enc.tile_bows[u]);
        for (std::size_t t = 0; t < enc.tiles.size(); ++t) {
            if (enc.tile_bows[u][t].empty) continue;
            LocalRelevance lr = local_feature_relevance(per_tile[t], enc.tile_mappings[u][t]);
            tiles[t].keypoints.insert(tiles[t].keypoints.end(), enc.tile_keypoints[u][t].begin(),
                                      enc.tile_keypoints[u][t].end());
            tiles[t].relevance.insert(tiles[t].relevance.end(), lr.per_feature.begin(),
                                      lr.per_feature.end());
        }
    }
    return pixel_heatmap(width, height, tiles, mode);
}

std::vector<std::size_t> iota_indices(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), std::size_t{0});
    return v;
}

} // namespace

Plane slide_heatmap(const RasterImage& img, const PipelineConfig& cfg,
                    const std::vector<Vocabulary>& vocabs, const TrainedSvm& model) {
    if (model.train_features.empty()) {
        throw std::invalid_argument("slide_heatmap: model has no embedded training features");
    }
    EncodedImage enc = encode_image(img, cfg, vocabs);
    const std::size_t n_feat = cfg.features.size();
    const std::size_t n_tiles = enc.tiles.size();

    auto tile_bundle = [&](std::size_t t) {
        MultiBow x(n_feat);
        for (std::size_t u = 0; u < n_feat; ++u) x[u] = enc.tile_bows[u][t];
        return x;
    };
    auto tile_usable = [&](std::size_t t) {
        for (std::size_t u = 0; u < n_feat; ++u) {
            if (enc.tile_bows[u][t].empty) return false;
        }
        return true;
    };

    bool all_hik = true;
    for (const KernelSpec& s : model.specs) all_hik &= s.kind == KernelKind::Hik;

    std::vector<double> tile_scores(n_tiles, 0.0);
    std::vector<bool> usable(n_tiles, false);
    for (std::size_t t = 0; t < n_tiles; ++t) {
        usable[t] = tile_usable(t);
        if (usable[t]) {
            tile_scores[t] = model_decision(model, model.train_features, tile_bundle(t));
        }
    }

    std::vector<TileRelevance> tiles(n_tiles);
    for (std::size_t t = 0; t < n_tiles; ++t) {
        tiles[t].tile = enc.tiles[t];
        if (!usable[t]) continue;
        MultiBow x = tile_bundle(t);

        DimensionRelevance rel;
        if (all_hik) {
            rel = hik_relevance(model, model.train_features, x);
        } else {
            std::vector<MultiBow> candidates;
            for (std::size_t v = 0; v < n_tiles && candidates.size() < 30; ++v) {
                if (v == t || !usable[v]) continue;
                if (tile_scores[t] * tile_scores[v] < 0.0) candidates.push_back(tile_bundle(v));
            }
            RootPoint root = chi2_root_point(model, model.train_features, x, candidates);
            rel = chi2_taylor_relevance(model, model.train_features, x, root);
        }
        for (std::size_t u = 0; u < n_feat; ++u) {
            LocalRelevance lr = local_feature_relevance(rel.r[u], enc.tile_mappings[u][t]);
            tiles[t].keypoints.insert(tiles[t].keypoints.end(), enc.tile_keypoints[u][t].begin(),
                                      enc.tile_keypoints[u][t].end());
            tiles[t].relevance.insert(tiles[t].relevance.end(), lr.per_feature.begin(),
                                      lr.per_feature.end());
        }
    }
    return pixel_heatmap(img.width(), img.height(), tiles, cfg.tile_normalization);
}

namespace {

PipelineResult run_synthetic(const PipelineConfig& cfg, const RunDirs& dirs) {
    PipelineResult result;
    result.run_dir = dirs.root;

    SyntheticDataset ds = build_dataset(cfg.n_train, cfg.n_test, cfg.seed);

    {
        auto out = open_report(dirs.reports / "dataset.csv");
        out << "id,split,score,score_clean,label,label_clean\n";
        for (std::size_t i = 0; i < ds.train.size(); ++i) {
            out << "train_" << i << ",train," << fmt(ds.train[i].score) << ','
                << fmt(ds.train[i].score_clean) << ',' << ds.train_labels[i] << ",\n";
        }
        for (std::size_t i = 0; i < ds.test.size(); ++i) {
            out << "test_" << i << ",test," << fmt(ds.test[i].score) << ','
                << fmt(ds.test[i].score_clean) << ',' << ds.test_labels[i] << ','
                << ds.test_labels_clean[i] << '\n';
        }
    }

    std::vector<const RasterImage*> train_imgs;
    for (const Scene& s : ds.train) train_imgs.push_back(&s.image);
    std::vector<Vocabulary> vocabs = train_codebooks(cfg, train_imgs);
    for (std::size_t u = 0; u < vocabs.size(); ++u) {
        write_vocabulary(dirs.vocab / ("u" + std::to_string(u) + ".rvoc"), vocabs[u]);
    }

    std::vector<EncodedImage> enc_train(ds.train.size());
    parallel_for(ds.train.size(), [&](std::size_t i) {
        enc_train[i] = encode_image(ds.train[i].image, cfg, vocabs);
    });
    std::vector<EncodedImage> enc_test(ds.test.size());
    parallel_for(ds.test.size(), [&](std::size_t i) {
        enc_test[i] = encode_image(ds.test[i].image, cfg, vocabs);
    });

    const std::size_t n_feat = cfg.features.size();
    std::vector<std::vector<BowVector>> train_feats(n_feat);
    for (std::size_t u = 0; u < n_feat; ++u) {
        for (const EncodedImage& e : enc_train) train_feats[u].push_back(e.image_bow[u]);
    }

    std::vector<KernelBase> bases;
    for (std::size_t u = 0; u < n_feat; ++u) {
        KernelSpec spec;
        spec.kind = cfg.kernel;
        bases.push_back(make_kernel_base(spec, train_feats[u]));
        write_kernel_cache(dirs.grams / ("u" + std::to_string(u) + ".gram"), bases.back(),
                           train_feats[u]);
    }

    auto all_train = iota_indices(ds.train.size());
    double C = cfg.fixed_C;
    if (C <= 0.0) {
        C = select_C_cv(bases, ds.train_labels, all_train, cfg.c_grid, cfg.select_folds,
                        derive_seed(cfg.seed, "select-C", 0), cfg.bandwidth);
    }
    result.chosen_C = C;

    std::vector<KernelSpec> calibrated;
    for (const KernelBase& b : bases) {
        calibrated.push_back(calibrate_subset(b, all_train, cfg.bandwidth));
    }
    KernelGram gram = subset_gram(bases, calibrated, all_train);
    TrainedSvm model = smo_train(gram, ds.train_labels, C);
    model.specs = calibrated;
    model.train_features = train_feats;
    write_model(dirs.models / "model.rsvm", model);

    std::vector<double> test_scores(ds.test.size());
    parallel_for(ds.test.size(), [&](std::size_t i) {
        test_scores[i] = decision_value(
            model, kernel_row(calibrated, train_feats, enc_test[i].image_bow));
    });
    result.mean_bac = balanced_accuracy(test_scores, ds.test_labels);
    result.bac_clean = balanced_accuracy(test_scores, ds.test_labels_clean);

    {
        auto out = open_report(dirs.reports / "predictions.csv");
        out << "id,score,label,label_clean,prediction\n";
        for (std::size_t i = 0; i < ds.test.size(); ++i) {
            out << "test_" << i << ',' << fmt(test_scores[i]) << ',' << ds.test_labels[i] << ','
                << ds.test_labels_clean[i] << ',' << (test_scores[i] > 0.0 ? 1 : -1) << '\n';
        }
    }

    if (cfg.heatmaps) {
        for (std::size_t i = 0; i < ds.test.size(); ++i) {
            DimensionRelevance rel = hik_relevance(model, train_feats, enc_test[i].image_bow);
            Plane hm = image_heatmap(enc_test[i], ds.test[i].image.width(),
                                     ds.test[i].image.height(), rel, cfg.tile_normalization);
            char name[64];
            std::snprintf(name, sizeof(name), "test_%05zu", i);
            write_raster(dirs.heatmaps / (std::string(name) + ".ras"), hm);
            write_png(dirs.heatmaps / (std::string(name) + ".png"), render_heatmap(hm));
            RasterImage grey = to_grayscale(ds.test[i].image);
            write_png(dirs.heatmaps / (std::string(name) + "_overlay.png"),
                      render_heatmap(hm, &grey, static_cast<float>(cfg.heatmap_overlay_alpha)));

            accumulate_quadrats(result.pooled_quadrats, ds.test[i].mask,
                                threshold_shift(hm, cfg.quadrat_threshold), cfg.quadrat_fraction);
        }
        result.quadrat_test_result = quadrat_chi2(result.pooled_quadrats);
        auto out = open_report(dirs.reports / "quadrat.csv");
        out << "both,only_morph,only_molec,neither,chi2,p,r_cl\n";
        out << result.pooled_quadrats.both << ',' << result.pooled_quadrats.only_morph << ','
            << result.pooled_quadrats.only_molec << ',' << result.pooled_quadrats.neither << ','
            << fmt(result.quadrat_test_result.statistic) << ',' << fmt_p(result.quadrat_test_result)
            << ',' << fmt(result.pooled_quadrats.r_cl()) << '\n';
    }

    {
        auto out = open_report(dirs.reports / "summary.csv");
        out << "n_train,n_test,C,bac,bac_clean\n";
        out << cfg.n_train << ',' << cfg.n_test << ',' << fmt(result.chosen_C) << ','
            << fmt(result.mean_bac) << ',' << fmt(result.bac_clean) << '\n';
    }
    return result;
}

struct LoadedImages {
    std::vector<RasterImage> images;
};

LoadedImages load_images(const SampleTable& table) {
    LoadedImages li;
    li.images.resize(table.images.size());
    for (std::size_t i = 0; i < table.images.size(); ++i) {
        li.images[i] = read_png(table.images[i]);
    }
    return li;
}

void write_cv_report(const std::filesystem::path& path, const std::string& target,
                     const CvReport& report) {
    auto out = open_report(path);
    out << "target,quantile,fold,C,bac\n";
    for (const QuantileOutcome& q : report.per_quantile) {
        for (const FoldOutcome& f : q.folds) {
            out << target << ',' << fmt(q.q) << ',' << f.fold << ',' << fmt(f.chosen_C) << ','
                << fmt(f.bac) << '\n';
        }
    }
}

void write_stats_report(const std::filesystem::path& path, const std::string& target,
                        const CvReport& report, std::size_t n) {
    auto out = open_report(path);
    out << "target,quantile,mean_bac,n_eff,p_hoeffding\n";
    for (const QuantileOutcome& q : report.per_quantile) {
        TestResult t = hoeffding_pvalue(q.mean_bac, n, q.q);
        out << target << ',' << fmt(q.q) << ',' << fmt(q.mean_bac) << ',' << fmt(t.n_eff) << ','
            << fmt_p(t) << '\n';
    }
}

PipelineResult run_molecular(const PipelineConfig& cfg, const RunDirs& dirs) {
    PipelineResult result;
    result.run_dir = dirs.root;

    SampleTable table = load_labeled_dataset(cfg.images_dir, cfg.labels_csv);
    LoadedImages li = load_images(table);

    std::vector<const RasterImage*> ptrs;
    for (const RasterImage& img : li.images) ptrs.push_back(&img);
    std::vector<Vocabulary> vocabs = train_codebooks(cfg, ptrs);
    for (std::size_t u = 0; u < vocabs.size(); ++u) {
        write_vocabulary(dirs.vocab / ("u" + std::to_string(u) + ".rvoc"), vocabs[u]);
    }

    std::vector<EncodedImage> enc(li.images.size());
    parallel_for(li.images.size(), [&](std::size_t i) {
        enc[i] = encode_image(li.images[i], cfg, vocabs);
    });

    const std::size_t n_feat = cfg.features.size();
    std::vector<std::vector<BowVector>> feats(n_feat);
    for (std::size_t u = 0; u < n_feat; ++u) {
        for (const EncodedImage& e : enc) feats[u].push_back(e.image_bow[u]);
    }
    std::vector<KernelBase> bases;
    for (std::size_t u = 0; u < n_feat; ++u) {
        KernelSpec spec;
        spec.kind = cfg.kernel;
        bases.push_back(make_kernel_base(spec, feats[u]));
        write_kernel_cache(dirs.grams / ("u" + std::to_string(u) + ".gram"), bases.back(),
                           feats[u]);
    }

    CvOptions opts;
    opts.outer_folds = cfg.outer_folds;
    opts.inner_folds = cfg.inner_folds;
    opts.c_grid = cfg.c_grid;
    opts.fixed_C = cfg.fixed_C;
    opts.seed = derive_seed(cfg.seed, "cv", 0);
    opts.bandwidth = cfg.bandwidth;
    CvReport report = nested_cv(bases, table.values, cfg.q_grid, opts);

    const std::string target = cfg.labels_csv.stem().string();
    write_cv_report(dirs.reports / "cv.csv", target, report);
    write_stats_report(dirs.reports / "stats.csv", target, report, table.values.size());

    const QuantileOutcome& best = report.best();
    result.mean_bac = best.mean_bac;
    result.best_q = best.q;
    double mean_C = 0.0;
    for (const FoldOutcome& f : best.folds) mean_C += f.chosen_C;
    result.chosen_C = mean_C / best.folds.size();

    {
        auto out = open_report(dirs.reports / "scores.csv");
        out << "id,quantile,label,oof_score\n";
        for (std::size_t i = 0; i < table.ids.size(); ++i) {
            out << table.ids[i] << ',' << fmt(best.q) << ',' << best.labels[i] << ','
                << fmt(best.oof_scores[i]) << '\n';
        }
    }

    // Final model on all samples at the best quantile (C = 1 per the
    // normalized-kernel convention); heatmaps from it are in-sample
    // visualizations.
    auto all = iota_indices(table.ids.size());
    std::vector<KernelSpec> calibrated;
    for (const KernelBase& b : bases) {
        calibrated.push_back(calibrate_subset(b, all, cfg.bandwidth));
    }
    KernelGram gram = subset_gram(bases, calibrated, all);
    TrainedSvm model = smo_train(gram, best.labels, 1.0);
    model.specs = calibrated;
    model.sample_ids = table.ids;
    model.train_features = feats;
    write_model(dirs.models / "model.rsvm", model);

    if (cfg.heatmaps) {
        for (std::size_t i = 0; i < li.images.size(); ++i) {
            DimensionRelevance rel = hik_relevance(model, feats, enc[i].image_bow);
            Plane hm = image_heatmap(enc[i], li.images[i].width(), li.images[i].height(), rel,
                                     cfg.tile_normalization);
            write_raster(dirs.heatmaps / (table.ids[i] + ".ras"), hm);
            write_png(dirs.heatmaps / (table.ids[i] + ".png"), render_heatmap(hm));
            RasterImage grey = to_grayscale(li.images[i]);
            write_png(dirs.heatmaps / (table.ids[i] + "_overlay.png"),
                      render_heatmap(hm, &grey, static_cast<float>(cfg.heatmap_overlay_alpha)));
        }
    }
    return result;
}

std::vector<int> binary_labels_from_values(const std::vector<double>& values) {
    std::vector<int> labels(values.size());
    bool pos = false, neg = false;
    for (std::size_t i = 0; i < values.size(); ++i) {
        labels[i] = values[i] > 0.0 ? +1 : -1;
        (labels[i] > 0 ? pos : neg) = true;
    }
    if (!pos || !neg) {
        throw std::invalid_argument("labels: both classes must be present (+1/-1 values)");
    }
    return labels;
}

PipelineResult run_patch_classifier(const PipelineConfig& cfg, const RunDirs& dirs) {
    PipelineResult result;
    result.run_dir = dirs.root;

    SampleTable table = load_labeled_dataset(cfg.images_dir, cfg.labels_csv);
    LoadedImages li = load_images(table);
    std::vector<int> labels = binary_labels_from_values(table.values);

    std::vector<const RasterImage*> ptrs;
    for (const RasterImage& img : li.images) ptrs.push_back(&img);
    std::vector<Vocabulary> vocabs = train_codebooks(cfg, ptrs);
    for (std::size_t u = 0; u < vocabs.size(); ++u) {
        write_vocabulary(dirs.vocab / ("u" + std::to_string(u) + ".rvoc"), vocabs[u]);
    }

    std::vector<EncodedImage> enc(li.images.size());
    parallel_for(li.images.size(), [&](std::size_t i) {
        enc[i] = encode_image(li.images[i], cfg, vocabs);
    });

    const std::size_t n_feat = cfg.features.size();
    std::vector<std::vector<BowVector>> feats(n_feat);
    for (std::size_t u = 0; u < n_feat; ++u) {
        for (const EncodedImage& e : enc) feats[u].push_back(e.image_bow[u]);
    }
    std::vector<KernelBase> bases;
    for (std::size_t u = 0; u < n_feat; ++u) {
        KernelSpec spec;
        spec.kind = cfg.kernel;
        bases.push_back(make_kernel_base(spec, feats[u]));
        write_kernel_cache(dirs.grams / ("u" + std::to_string(u) + ".gram"), bases.back(),
                           feats[u]);
    }

    // k-fold accuracy report at fixed C over the direct binary labels.
    CvOptions opts;
    opts.outer_folds = cfg.outer_folds;
    opts.fixed_C = cfg.fixed_C > 0.0 ? cfg.fixed_C : 1.0;
    opts.seed = derive_seed(cfg.seed, "cv", 0);
    opts.bandwidth = cfg.bandwidth;
    std::vector<double> values(labels.begin(), labels.end());
    CvReport report = nested_cv(bases, values, {0.5}, opts);
    result.mean_bac = report.best().mean_bac;
    result.chosen_C = opts.fixed_C;
    write_cv_report(dirs.reports / "cv.csv", task_name(cfg.task), report);

    // Final model on all patches.
    auto all = iota_indices(table.ids.size());
    std::vector<KernelSpec> calibrated;
    for (const KernelBase& b : bases) calibrated.push_back(calibrate_subset(b, all, cfg.bandwidth));
    KernelGram gram = subset_gram(bases, calibrated, all);
    TrainedSvm model = smo_train(gram, labels, opts.fixed_C);
    model.specs = calibrated;
    model.sample_ids = table.ids;
    model.train_features = feats;
    write_model(dirs.models / "model.rsvm", model);

    {
        auto out = open_report(dirs.reports / "scores.csv");
        out << "id,label,oof_score\n";
        const QuantileOutcome& q = report.best();
        for (std::size_t i = 0; i < table.ids.size(); ++i) {
            out << table.ids[i] << ',' << labels[i] << ',' << fmt(q.oof_scores[i]) << '\n';
        }
    }
    return result;
}

PipelineResult run_survival(const PipelineConfig& cfg, const RunDirs& dirs) {
    PipelineResult result;
    result.run_dir = dirs.root;

    SampleTable table = load_survival_dataset(cfg.images_dir, cfg.labels_csv);
    LoadedImages li = load_images(table);

    std::vector<const RasterImage*> ptrs;
    for (const RasterImage& img : li.images) ptrs.push_back(&img);
    std::vector<Vocabulary> vocabs = train_codebooks(cfg, ptrs);
    for (std::size_t u = 0; u < vocabs.size(); ++u) {
        write_vocabulary(dirs.vocab / ("u" + std::to_string(u) + ".rvoc"), vocabs[u]);
    }

    std::vector<EncodedImage> enc(li.images.size());
    parallel_for(li.images.size(), [&](std::size_t i) {
        enc[i] = encode_image(li.images[i], cfg, vocabs);
    });
    const std::size_t n_feat = cfg.features.size();
    std::vector<std::vector<BowVector>> feats(n_feat);
    for (std::size_t u = 0; u < n_feat; ++u) {
        for (const EncodedImage& e : enc) feats[u].push_back(e.image_bow[u]);
    }
    std::vector<KernelBase> bases;
    for (std::size_t u = 0; u < n_feat; ++u) {
        KernelSpec spec;
        spec.kind = cfg.kernel;
        bases.push_back(make_kernel_base(spec, feats[u]));
    }

    SurvivalLabels sl = survival_labels(table.values, table.censored, cfg.survival_cutoff);
    std::vector<int> full_labels(table.values.size(), 0);
    for (std::size_t k = 0; k < sl.uncensored.size(); ++k) {
        full_labels[sl.uncensored[k]] = sl.labels[k];
    }

    // k-fold over the uncensored samples; censored samples are scored by a
    // seeded-random fold model (recorded per sample).
    Rng rng(derive_seed(cfg.seed, "survival-folds", 0));
    auto folds = stratified_folds(full_labels, sl.uncensored, cfg.outer_folds, rng);
    double C = cfg.fixed_C > 0.0 ? cfg.fixed_C : 1.0;
    result.chosen_C = C;

    std::vector<double> scores(table.values.size(), 0.0);
    std::vector<int> fold_of(table.values.size(), -1);

    struct FoldModel {
        TrainedSvm model;
        std::vector<KernelSpec> calibrated;
        std::vector<std::size_t> train;
    };
    std::vector<FoldModel> fold_models;
    for (int f = 0; f < cfg.outer_folds; ++f) {
        std::set<std::size_t> held(folds[f].begin(), folds[f].end());
        FoldModel fm;
        for (std::size_t idx : sl.uncensored) {
            if (!held.contains(idx)) fm.train.push_back(idx);
        }
        for (const KernelBase& b : bases) {
            fm.calibrated.push_back(calibrate_subset(b, fm.train, cfg.bandwidth));
        }
        KernelGram gram = subset_gram(bases, fm.calibrated, fm.train);
        std::vector<int> y;
        for (std::size_t idx : fm.train) y.push_back(full_labels[idx]);
        fm.model = smo_train(gram, y, C);
        fm.model.specs = fm.calibrated;
        for (std::size_t idx : folds[f]) {
            scores[idx] = decision_value(
                fm.model, subset_kernel_row(bases, fm.calibrated, fm.train, idx));
            fold_of[idx] = f;
        }
        fold_models.push_back(std::move(fm));
    }

    Rng pick(derive_seed(cfg.seed, "censored-fold", 0));
    for (std::size_t i = 0; i < table.values.size(); ++i) {
        if (!table.censored[i]) continue;
        int f = static_cast<int>(pick.uniform_index(cfg.outer_folds));
        const FoldModel& fm = fold_models[f];
        scores[i] = decision_value(fm.model,
                                   subset_kernel_row(bases, fm.calibrated, fm.train, i));
        fold_of[i] = f;
    }

    std::vector<double> unc_scores;
    std::vector<int> unc_labels;
    for (std::size_t k = 0; k < sl.uncensored.size(); ++k) {
        unc_scores.push_back(scores[sl.uncensored[k]]);
        unc_labels.push_back(sl.labels[k]);
    }
    result.mean_bac = balanced_accuracy(unc_scores, unc_labels);

    std::vector<int> groups(table.values.size());
    std::vector<bool> events(table.values.size());
    for (std::size_t i = 0; i < table.values.size(); ++i) {
        groups[i] = scores[i] > 0.0 ? +1 : -1;
        events[i] = !table.censored[i];
    }
    result.logrank = logrank_test(table.values, events, groups);

    {
        auto out = open_report(dirs.reports / "survival.csv");
        out << "id,time_months,censored,fold,score,group\n";
        for (std::size_t i = 0; i < table.ids.size(); ++i) {
            out << table.ids[i] << ',' << fmt(table.values[i]) << ',' << (table.censored[i] ? 1 : 0)
                << ',' << fold_of[i] << ',' << fmt(scores[i]) << ',' << groups[i] << '\n';
        }
    }
    {
        auto out = open_report(dirs.reports / "logrank.csv");
        out << "statistic,p,observed_a,expected_a,bac_uncensored\n";
        out << fmt(result.logrank->statistic) << ',' << fmt_p(result.logrank->test) << ','
            << fmt(result.logrank->observed_a) << ',' << fmt(result.logrank->expected_a) << ','
            << fmt(result.mean_bac) << '\n';
    }
    for (int which = 0; which < 2; ++which) {
        const KaplanMeier& km = which == 0 ? result.logrank->km_a : result.logrank->km_b;
        auto out = open_report(dirs.reports / (which == 0 ? "km_high.csv" : "km_low.csv"));
        out << "time,survival\n";
        for (std::size_t i = 0; i < km.times.size(); ++i) {
            out << fmt(km.times[i]) << ',' << fmt(km.survival[i]) << '\n';
        }
    }
    return result;
}

} // namespace

PipelineResult run_pipeline(const PipelineConfig& cfg) {
    validate_config(cfg);
    RunDirs dirs = make_run_dirs(cfg);

    auto staged = [](const char* stage, auto&& fn) -> PipelineResult {
        try {
            return fn();
        } catch (const std::exception& e) {
            throw std::runtime_error(std::string("pipeline stage '") + stage + "' failed: " +
                                     e.what());
        }
    };

    switch (cfg.task) {
        case TaskKind::Synthetic:
            return staged("synthetic", [&] { return run_synthetic(cfg, dirs); });
        case TaskKind::Molecular:
            return staged("molecular", [&] { return run_molecular(cfg, dirs); });
        case TaskKind::Cancer:
        case TaskKind::Lymphocyte:
            return staged("patch-classifier", [&] { return run_patch_classifier(cfg, dirs); });
        case TaskKind::Survival:
            return staged("survival", [&] { return run_survival(cfg, dirs); });
    }
    throw std::logic_error("run_pipeline: unhandled task");
}

} // namespace relmap
