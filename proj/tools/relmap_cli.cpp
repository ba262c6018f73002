#include "relmap/pipeline.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace relmap;

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

PipelineConfig load_cli_config(const std::string& config_path, std::uint64_t seed_override,
                               const std::string& run_dir_override) {
    PipelineConfig cfg = load_config(config_path);
    if (seed_override != static_cast<std::uint64_t>(-1)) cfg.seed = seed_override;
    if (!run_dir_override.empty()) cfg.run_dir = run_dir_override;
    return cfg;
}

std::vector<Vocabulary> load_vocab_dir(const std::filesystem::path& dir, std::size_t count) {
    std::vector<Vocabulary> vocabs;
    for (std::size_t u = 0; u < count; ++u) {
        vocabs.push_back(read_vocabulary(dir / ("u" + std::to_string(u) + ".rvoc")));
    }
    return vocabs;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open CSV: " + path.string());
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (first) {
            table.header = cells;
            first = false;
        } else {
            table.rows.push_back(cells);
        }
    }
    return table;
}

std::size_t column_index(const CsvTable& table, const std::string& name) {
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (table.header[i] == name) return i;
    }
    throw std::invalid_argument("CSV is missing column '" + name + "'");
}

int cmd_synth(const std::string& out_dir, int n_train, int n_test, std::uint64_t seed,
              bool allow_any_size) {
    if (!allow_any_size && n_train != 100 && n_train != 500 && n_train != 1500) {
        throw std::invalid_argument(
            "synth: n-train must be one of 100/500/1500 (use --allow-any-size to override)");
    }
    auto ds = build_dataset(n_train, n_test, seed);
    export_dataset(out_dir, ds);
    std::cout << "wrote " << ds.train.size() << " training and " << ds.test.size()
              << " test scenes under " << out_dir << "\n";
    return 0;
}

int cmd_extract(const PipelineConfig& cfg, const std::string& out_dir) {
    SampleTable table = load_labeled_dataset(cfg.images_dir, cfg.labels_csv);
    std::filesystem::create_directories(out_dir);
    for (std::size_t i = 0; i < table.ids.size(); ++i) {
        RasterImage img = read_png(table.images[i]);
        for (std::size_t u = 0; u < cfg.features.size(); ++u) {
            const FeatureConfig& fc = cfg.features[u].config;
            ImageContext ctx = make_image_context(img, fc.channels);
            DescriptorSet all;
            all.kind = fc.name();
            all.dim = fc.dimension();
            int side = std::min({cfg.tile_side, img.width(), img.height()});
            for (const Tile& tile : tile_grid(img.width(), img.height(), side, cfg.tile_stride)) {
                DescriptorSet set = extract_tile_descriptors(ctx, fc, tile);
                for (std::size_t k = 0; k < set.count(); ++k) all.append(set.keypoints[k], set.row(k));
            }
            write_descriptors(std::filesystem::path(out_dir) /
                                  (table.ids[i] + "_u" + std::to_string(u) + ".rdsc"),
                              all);
        }
    }
    std::cout << "extracted descriptors for " << table.ids.size() << " images into " << out_dir
              << "\n";
    return 0;
}

int cmd_codebook(const PipelineConfig& cfg, const std::vector<std::string>& inputs,
                 std::size_t feature_index, const std::string& out_file) {
    if (feature_index >= cfg.features.size()) {
        throw std::invalid_argument("codebook: feature index out of range");
    }
    const FeatureSpec& fs = cfg.features[feature_index];
    DescriptorSet merged;
    merged.kind = fs.config.name();
    merged.dim = fs.config.dimension();
    for (const std::string& path : inputs) {
        DescriptorSet set = read_descriptors(path);
        if (set.dim != merged.dim) {
            throw std::invalid_argument("codebook: descriptor dimension mismatch in " + path);
        }
        for (std::size_t i = 0; i < set.count(); ++i) merged.append(set.keypoints[i], set.row(i));
    }
    MetricWeights metric = fs.config.parts.size() > 1
                               ? compute_metric_weights(merged, fs.config.block_dims())
                               : unit_metric_weights(merged.dim);
    if (metric.zeroed_dims > 0) {
        std::cerr << "warning: " << metric.zeroed_dims
                  << " descriptor dimensions had zero deviation; weights set to 0\n";
    }
    KmeansOptions opts;
    opts.max_iters = cfg.kmeans_max_iters;
    opts.seed = derive_seed(cfg.seed, "kmeans", feature_index);
    Vocabulary vocab = kmeans_train(merged, metric, fs.vocabulary, opts);
    write_vocabulary(out_file, vocab);
    std::cout << "trained vocabulary (" << vocab.k << " words, dim " << vocab.dim << ") from "
              << merged.count() << " descriptors -> " << out_file << "\n";
    return 0;
}

struct EncodedTable {
    SampleTable table;
    std::vector<std::vector<BowVector>> feats; // [u][sample]
    std::vector<EncodedImage> encoded;
};

EncodedTable encode_table(const PipelineConfig& cfg, const std::vector<Vocabulary>& vocabs,
                          bool survival, bool keep_encoded) {
    EncodedTable out;
    out.table = survival ? load_survival_dataset(cfg.images_dir, cfg.labels_csv)
                         : load_labeled_dataset(cfg.images_dir, cfg.labels_csv);
    out.feats.resize(cfg.features.size());
    for (std::size_t i = 0; i < out.table.ids.size(); ++i) {
        RasterImage img = read_png(out.table.images[i]);
        EncodedImage enc = encode_image(img, cfg, vocabs);
        for (std::size_t u = 0; u < cfg.features.size(); ++u) {
            out.feats[u].push_back(enc.image_bow[u]);
        }
        if (keep_encoded) out.encoded.push_back(std::move(enc));
    }
    return out;
}

int cmd_gram(const PipelineConfig& cfg, const std::string& vocab_dir, const std::string& out_dir) {
    auto vocabs = load_vocab_dir(vocab_dir, cfg.features.size());
    EncodedTable enc = encode_table(cfg, vocabs, false, false);
    std::filesystem::create_directories(out_dir);
    for (std::size_t u = 0; u < cfg.features.size(); ++u) {
        KernelSpec spec;
        spec.kind = cfg.kernel;
        KernelBase base = make_kernel_base(spec, enc.feats[u]);
        write_kernel_cache(std::filesystem::path(out_dir) / ("u" + std::to_string(u) + ".gram"),
                           base, enc.feats[u]);
    }
    std::cout << "wrote " << cfg.features.size() << " kernel caches (" << enc.table.ids.size()
              << " samples) into " << out_dir << "\n";
    return 0;
}

int cmd_train(const PipelineConfig& cfg, const std::string& vocab_dir, const std::string& out_file,
              double q) {
    auto vocabs = load_vocab_dir(vocab_dir, cfg.features.size());
    EncodedTable enc = encode_table(cfg, vocabs, false, false);

    std::vector<int> labels = threshold_labels(enc.table.values, q);
    std::vector<KernelBase> bases;
    for (std::size_t u = 0; u < cfg.features.size(); ++u) {
        KernelSpec spec;
        spec.kind = cfg.kernel;
        bases.push_back(make_kernel_base(spec, enc.feats[u]));
    }
    std::vector<std::size_t> all(enc.table.ids.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    std::vector<KernelSpec> calibrated;
    for (const KernelBase& b : bases) calibrated.push_back(calibrate_subset(b, all, cfg.bandwidth));

    double C = cfg.fixed_C;
    if (C <= 0.0) {
        C = select_C_cv(bases, labels, all, cfg.c_grid, cfg.select_folds,
                        derive_seed(cfg.seed, "select-C", 0), cfg.bandwidth);
    }
    KernelGram gram = subset_gram(bases, calibrated, all);
    TrainedSvm model = smo_train(gram, labels, C);
    model.specs = calibrated;
    model.sample_ids = enc.table.ids;
    model.train_features = enc.feats;
    write_model(out_file, model);
    std::cout << "trained model (n=" << enc.table.ids.size() << ", C=" << fmt(C) << ", q=" << q
              << ") -> " << out_file << "\n";
    return 0;
}

int cmd_cv(const PipelineConfig& cfg, const std::string& vocab_dir, const std::string& out_csv) {
    auto vocabs = load_vocab_dir(vocab_dir, cfg.features.size());
    EncodedTable enc = encode_table(cfg, vocabs, false, false);
    std::vector<KernelBase> bases;
    for (std::size_t u = 0; u < cfg.features.size(); ++u) {
        KernelSpec spec;
        spec.kind = cfg.kernel;
        bases.push_back(make_kernel_base(spec, enc.feats[u]));
    }
    CvOptions opts;
    opts.outer_folds = cfg.outer_folds;
    opts.inner_folds = cfg.inner_folds;
    opts.c_grid = cfg.c_grid;
    opts.fixed_C = cfg.fixed_C;
    opts.seed = derive_seed(cfg.seed, "cv", 0);
    opts.bandwidth = cfg.bandwidth;
    CvReport report = nested_cv(bases, enc.table.values, cfg.q_grid, opts);

    std::ofstream out(out_csv);
    if (!out) throw std::runtime_error("cannot write " + out_csv);
    out << "target,quantile,fold,C,bac\n";
    const std::string target = cfg.labels_csv.stem().string();
    for (const auto& q : report.per_quantile) {
        for (const auto& f : q.folds) {
            out << target << ',' << fmt(q.q) << ',' << f.fold << ',' << fmt(f.chosen_C) << ','
                << fmt(f.bac) << '\n';
        }
    }
    std::cout << "best quantile " << fmt(report.best().q) << " mean balanced accuracy "
              << fmt(report.best().mean_bac) << " -> " << out_csv << "\n";
    return 0;
}

int cmd_heatmap(const PipelineConfig& cfg, const std::string& vocab_dir,
                const std::string& model_file, const std::string& image_file,
                const std::string& out_prefix, bool overlay) {
    auto vocabs = load_vocab_dir(vocab_dir, cfg.features.size());
    TrainedSvm model = read_model(model_file);
    RasterImage img = read_png(image_file);

    Plane hm;
    if (cfg.task == TaskKind::Molecular || cfg.task == TaskKind::Survival ||
        cfg.task == TaskKind::Synthetic) {
        for (const KernelSpec& s : model.specs) {
            if (s.kind != KernelKind::Hik) {
                throw std::invalid_argument(
                    "heatmap: averaged-feature tasks decompose HIK models only; chi2 relevance "
                    "needs per-tile candidates (cancer/lymphocyte configs)");
            }
        }
        EncodedImage enc = encode_image(img, cfg, vocabs);
        DimensionRelevance rel = hik_relevance(model, model.train_features, enc.image_bow);
        std::vector<TileRelevance> tiles(enc.tiles.size());
        for (std::size_t t = 0; t < enc.tiles.size(); ++t) tiles[t].tile = enc.tiles[t];
        for (std::size_t u = 0; u < rel.r.size(); ++u) {
            auto per_tile = spread_to_tiles(rel.r[u], enc.image_bow[u], enc.tile_bows[u]);
            for (std::size_t t = 0; t < enc.tiles.size(); ++t) {
                if (enc.tile_bows[u][t].empty) continue;
                LocalRelevance lr = local_feature_relevance(per_tile[t], enc.tile_mappings[u][t]);
                tiles[t].keypoints.insert(tiles[t].keypoints.end(),
                                          enc.tile_keypoints[u][t].begin(),
                                          enc.tile_keypoints[u][t].end());
                tiles[t].relevance.insert(tiles[t].relevance.end(), lr.per_feature.begin(),
                                          lr.per_feature.end());
            }
        }
        hm = pixel_heatmap(img.width(), img.height(), tiles, cfg.tile_normalization);
    } else {
        hm = slide_heatmap(img, cfg, vocabs, model);
    }

    write_raster(out_prefix + ".ras", hm);
    write_png(out_prefix + ".png", render_heatmap(hm));
    if (overlay) {
        RasterImage grey = to_grayscale(img);
        write_png(out_prefix + "_overlay.png",
                  render_heatmap(hm, &grey, static_cast<float>(cfg.heatmap_overlay_alpha)));
    }
    std::cout << "wrote heatmap " << out_prefix << ".{ras,png}\n";
    return 0;
}

int cmd_stats_hoeffding(const std::string& in_csv, double alpha, const std::string& out_csv) {
    CsvTable table = read_csv(in_csv);
    std::size_t id_col = column_index(table, "target");
    std::size_t bac_col = column_index(table, "bac");
    std::size_t n_col = column_index(table, "n");
    std::size_t q_col = column_index(table, "q");

    std::vector<double> pvalues;
    std::vector<TestResult> results;
    for (const auto& row : table.rows) {
        double bac = std::stod(row[bac_col]);
        std::size_t n = static_cast<std::size_t>(std::stoul(row[n_col]));
        double q = std::stod(row[q_col]);
        results.push_back(hoeffding_pvalue(bac, n, q));
        pvalues.push_back(results.back().p);
    }
    BhResult bh = benjamini_hochberg(pvalues, alpha);
    std::vector<int> sig_up(pvalues.size(), 0), sig_lit(pvalues.size(), 0);
    for (std::size_t i : bh.step_up) sig_up[i] = 1;
    for (std::size_t i : bh.first_violation) sig_lit[i] = 1;

    std::ofstream out(out_csv);
    if (!out) throw std::runtime_error("cannot write " + out_csv);
    out << "target,bac,n,q,n_eff,p,significant_step_up,significant_first_violation\n";
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        out << table.rows[i][id_col] << ',' << table.rows[i][bac_col] << ',' << table.rows[i][n_col]
            << ',' << table.rows[i][q_col] << ',' << fmt(results[i].n_eff) << ','
            << fmt_p(results[i]) << ',' << sig_up[i] << ',' << sig_lit[i] << '\n';
    }
    std::cout << bh.step_up.size() << " of " << pvalues.size()
              << " targets significant (step-up rule, alpha " << alpha << ") -> " << out_csv
              << "\n";
    return 0;
}

int cmd_stats_mc_fdr(const std::string& true_csv, const std::string& perm_csv, double threshold) {
    auto load_bacs = [](const std::string& path) {
        CsvTable t = read_csv(path);
        std::size_t col = column_index(t, "bac");
        std::vector<double> v;
        for (const auto& row : t.rows) v.push_back(std::stod(row[col]));
        return v;
    };
    double bound = monte_carlo_fdr(load_bacs(true_csv), load_bacs(perm_csv), threshold);
    std::cout << "FDR upper bound at bac >= " << threshold << ": " << fmt(bound) << "\n";
    return 0;
}

int cmd_stats_quadrat(const std::string& morph_ras, const std::string& molec_ras,
                      double fraction) {
    Plane morph = read_raster(morph_ras);
    Plane molec = read_raster(molec_ras);
    QuadratOutcome out = quadrat_test(morph, molec, fraction);
    std::cout << "table [both " << out.table.both << ", only-morph " << out.table.only_morph
              << ", only-molec " << out.table.only_molec << ", neither " << out.table.neither
              << "]\n";
    std::cout << "chi2 " << fmt(out.test.statistic) << " p " << fmt_p(out.test) << " r_cl "
              << fmt(out.table.r_cl()) << "\n";
    return 0;
}

int cmd_stats_logrank(const std::string& in_csv) {
    CsvTable table = read_csv(in_csv);
    std::size_t time_col = column_index(table, "time_months");
    std::size_t cens_col = column_index(table, "censored");
    std::size_t group_col = column_index(table, "group");
    std::vector<double> times;
    std::vector<bool> events;
    std::vector<int> groups;
    for (const auto& row : table.rows) {
        times.push_back(std::stod(row[time_col]));
        events.push_back(std::stoi(row[cens_col]) == 0);
        groups.push_back(std::stoi(row[group_col]));
    }
    LogRankResult r = logrank_test(times, events, groups);
    std::cout << "log-rank chi2 " << fmt(r.statistic) << " p " << fmt_p(r.test) << "\n";
    return 0;
}

int run_cli(int argc, char** argv) {
    CLI::App app{"Bag-of-words kernel classification with relevance heatmaps"};
    app.require_subcommand(1);

    std::string config_path, run_dir_override;
    std::uint64_t seed_override = static_cast<std::uint64_t>(-1);

    auto add_config_opts = [&](CLI::App* cmd, bool required = true) {
        auto* opt = cmd->add_option("--config", config_path, "pipeline config (JSON)");
        if (required) opt->required();
        cmd->add_option("--seed", seed_override, "override the config seed");
        cmd->add_option("--run-dir", run_dir_override, "override the run directory");
    };

    // synth
    auto* synth = app.add_subcommand("synth", "generate the synthetic shapes dataset");
    std::string synth_out = "synthetic";
    int n_train = 100, n_test = 100;
    std::uint64_t synth_seed = 42;
    bool allow_any = false;
    synth->add_option("--out", synth_out, "output directory");
    synth->add_option("--n-train", n_train, "training scenes (100/500/1500)");
    synth->add_option("--n-test", n_test, "test scenes");
    synth->add_option("--seed", synth_seed, "generation seed");
    synth->add_flag("--allow-any-size", allow_any, "accept training sizes off the ladder");

    // extract
    auto* extract = app.add_subcommand("extract", "extract local descriptors to binary records");
    std::string extract_out = "descriptors";
    add_config_opts(extract);
    extract->add_option("--out", extract_out, "output directory");

    // codebook
    auto* codebook = app.add_subcommand("codebook", "train a visual vocabulary from descriptors");
    std::vector<std::string> cb_inputs;
    std::size_t cb_feature = 0;
    std::string cb_out = "vocab.rvoc";
    add_config_opts(codebook);
    codebook->add_option("--inputs", cb_inputs, "descriptor record files")->required();
    codebook->add_option("--feature", cb_feature, "feature index in the config");
    codebook->add_option("--out", cb_out, "output vocabulary file");

    // gram
    auto* gram = app.add_subcommand("gram", "precompute kernel caches over a dataset");
    std::string gram_vocab = "vocab", gram_out = "grams";
    add_config_opts(gram);
    gram->add_option("--vocab-dir", gram_vocab, "directory with u<k>.rvoc files");
    gram->add_option("--out", gram_out, "output directory");

    // train
    auto* train = app.add_subcommand("train", "train an SVM on the full dataset");
    std::string train_vocab = "vocab", train_out = "model.rsvm";
    double train_q = 0.5;
    add_config_opts(train);
    train->add_option("--vocab-dir", train_vocab, "directory with u<k>.rvoc files");
    train->add_option("--out", train_out, "output model file");
    train->add_option("--quantile", train_q, "label threshold quantile");

    // cv
    auto* cv = app.add_subcommand("cv", "nested cross-validation report");
    std::string cv_vocab = "vocab", cv_out = "cv.csv";
    add_config_opts(cv);
    cv->add_option("--vocab-dir", cv_vocab, "directory with u<k>.rvoc files");
    cv->add_option("--out", cv_out, "output CSV");

    // heatmap
    auto* heatmap = app.add_subcommand("heatmap", "relevance heatmap for one image");
    std::string hm_vocab = "vocab", hm_model = "model.rsvm", hm_image, hm_out = "heatmap";
    bool hm_overlay = false;
    add_config_opts(heatmap);
    heatmap->add_option("--vocab-dir", hm_vocab, "directory with u<k>.rvoc files");
    heatmap->add_option("--model", hm_model, "trained model file");
    heatmap->add_option("--image", hm_image, "input image (PNG)")->required();
    heatmap->add_option("--out", hm_out, "output prefix");
    heatmap->add_flag("--overlay", hm_overlay, "also write a grayscale overlay");

    // stats
    auto* stats = app.add_subcommand("stats", "statistical tests on result tables");
    stats->require_subcommand(1);
    auto* hoeff = stats->add_subcommand("hoeffding-bh", "per-target p-values + FDR control");
    std::string st_in, st_out = "stats.csv";
    double st_alpha = 0.05;
    hoeff->add_option("--in", st_in, "CSV with columns target,bac,n,q")->required();
    hoeff->add_option("--alpha", st_alpha, "FDR level");
    hoeff->add_option("--out", st_out, "output CSV");

    auto* mcfdr = stats->add_subcommand("mc-fdr", "Monte-Carlo FDR bound");
    std::string mc_true, mc_perm;
    double mc_t = 0.6;
    mcfdr->add_option("--true", mc_true, "CSV with column bac (true labels)")->required();
    mcfdr->add_option("--permuted", mc_perm, "CSV with column bac (permuted labels)")->required();
    mcfdr->add_option("--threshold", mc_t, "balanced accuracy threshold");

    auto* quad = stats->add_subcommand("quadrat", "quadrat co-localization test on two rasters");
    std::string q_morph, q_molec;
    double q_fraction = 0.10;
    quad->add_option("--morph", q_morph, "morphological mask raster")->required();
    quad->add_option("--molec", q_molec, "molecular mask/heatmap raster")->required();
    quad->add_option("--fraction", q_fraction, "quadrat side as fraction of width");

    auto* lr = stats->add_subcommand("logrank", "log-rank test on a survival CSV");
    std::string lr_in;
    lr->add_option("--in", lr_in, "CSV with columns time_months,censored,group")->required();

    // run
    auto* run = app.add_subcommand("run", "full pipeline under a run directory");
    add_config_opts(run);

    CLI11_PARSE(app, argc, argv);

    if (synth->parsed()) return cmd_synth(synth_out, n_train, n_test, synth_seed, allow_any);

    if (run->parsed()) {
        PipelineConfig cfg = load_cli_config(config_path, seed_override, run_dir_override);
        PipelineResult result = run_pipeline(cfg);
        std::cout << "run complete under " << result.run_dir << "\n";
        std::cout << "balanced accuracy " << fmt(result.mean_bac);
        if (cfg.task == TaskKind::Synthetic) {
            std::cout << " (ground-truth labels " << fmt(result.bac_clean) << ")";
        }
        std::cout << "\n";
        if (cfg.task == TaskKind::Synthetic && cfg.heatmaps) {
            std::cout << "pooled quadrat chi2 " << fmt(result.quadrat_test_result.statistic)
                      << " p " << fmt_p(result.quadrat_test_result) << "\n";
        }
        if (result.logrank) {
            std::cout << "log-rank chi2 " << fmt(result.logrank->statistic) << " p "
                      << fmt_p(result.logrank->test) << "\n";
        }
        return 0;
    }

    PipelineConfig cfg;
    if (!config_path.empty()) cfg = load_cli_config(config_path, seed_override, run_dir_override);

    if (extract->parsed()) return cmd_extract(cfg, extract_out);
    if (codebook->parsed()) return cmd_codebook(cfg, cb_inputs, cb_feature, cb_out);
    if (gram->parsed()) return cmd_gram(cfg, gram_vocab, gram_out);
    if (train->parsed()) return cmd_train(cfg, train_vocab, train_out, train_q);
    if (cv->parsed()) return cmd_cv(cfg, cv_vocab, cv_out);
    if (heatmap->parsed()) return cmd_heatmap(cfg, hm_vocab, hm_model, hm_image, hm_out, hm_overlay);
    if (stats->parsed()) {
        if (hoeff->parsed()) return cmd_stats_hoeffding(st_in, st_alpha, st_out);
        if (mcfdr->parsed()) return cmd_stats_mc_fdr(mc_true, mc_perm, mc_t);
        if (quad->parsed()) return cmd_stats_quadrat(q_morph, q_molec, q_fraction);
        if (lr->parsed()) return cmd_stats_logrank(lr_in);
    }
    throw std::logic_error("no subcommand handled");
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
