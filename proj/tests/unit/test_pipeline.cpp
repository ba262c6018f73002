#include "relmap/pipeline.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

} // namespace

TEST_CASE("task templates pin the paper configurations") {
    relmap::PipelineConfig cancer;
    cancer.task = relmap::TaskKind::Cancer;
    relmap::apply_task_template(cancer);
    CHECK(cancer.features.size() == 3);
    CHECK(cancer.kernel == relmap::KernelKind::Chi2);
    CHECK(cancer.fixed_C == 1.0);
    CHECK(cancer.tile_side == 102);
    CHECK(cancer.tile_stride == 34);
    for (const auto& f : cancer.features) CHECK(f.config.dimension() == 292);

    relmap::PipelineConfig lymph;
    lymph.task = relmap::TaskKind::Lymphocyte;
    relmap::apply_task_template(lymph);
    CHECK(lymph.features.size() == 6);
    CHECK(lymph.kernel == relmap::KernelKind::Hik);

    relmap::PipelineConfig mol;
    mol.task = relmap::TaskKind::Molecular;
    relmap::apply_task_template(mol);
    CHECK(mol.tile_side == 201);
    CHECK(mol.tile_stride == 67);
    CHECK(mol.features.size() == 1);
    CHECK(mol.features[0].config.dimension() == 256);
    CHECK(mol.q_grid.size() == 9);
    REQUIRE(mol.c_grid.size() == 5);
    // C grid 10^(p/2), p = -2..2.
    CHECK(mol.c_grid[0] == doctest::Approx(0.1));
    CHECK(mol.c_grid[1] == doctest::Approx(0.31622776601));
    CHECK(mol.c_grid[2] == doctest::Approx(1.0));
    CHECK(mol.c_grid[3] == doctest::Approx(3.16227766016));
    CHECK(mol.c_grid[4] == doctest::Approx(10.0));

    relmap::PipelineConfig synth;
    synth.task = relmap::TaskKind::Synthetic;
    relmap::apply_task_template(synth);
    CHECK(synth.tile_side == 300);
    CHECK(synth.features[0].config.grid_stride == 6);
    REQUIRE(synth.c_grid.size() == 5);
    CHECK(synth.c_grid[0] == doctest::Approx(1.0 / 16.0));
    CHECK(synth.c_grid[4] == doctest::Approx(16.0));
    CHECK(synth.select_folds == 5);
}

TEST_CASE("config json round trip and overrides") {
    auto cfg = relmap::config_from_json_text(R"({
        "task": "synthetic",
        "seed": 9,
        "n_train": 24,
        "n_test": 6,
        "kmeans_max_iters": 7,
        "features": [{"parts": ["sift"], "channels": ["grey"], "scale": 2.0,
                      "grid_stride": 8, "vocabulary": 32}]
    })");
    CHECK(cfg.seed == 9);
    CHECK(cfg.n_train == 24);
    CHECK(cfg.features.size() == 1);
    CHECK(cfg.features[0].vocabulary == 32);
    CHECK(cfg.features[0].config.channels ==
          std::vector<relmap::ColorChannel>{relmap::ColorChannel::Grey});
    // Template fields not overridden survive.
    CHECK(cfg.select_folds == 5);
    CHECK(cfg.tile_side == 300);

    auto text = relmap::resolved_config_text(cfg);
    auto back = relmap::config_from_json_text(text);
    CHECK(back.seed == cfg.seed);
    CHECK(back.n_train == cfg.n_train);
    CHECK(back.features[0].vocabulary == 32);
    CHECK(back.kmeans_max_iters == 7);
}

TEST_CASE("config validation errors") {
    relmap::PipelineConfig cfg;
    cfg.task = relmap::TaskKind::Molecular;
    relmap::apply_task_template(cfg);
    cfg.images_dir = "/nonexistent/images";
    cfg.labels_csv = "/nonexistent/labels.csv";
    CHECK_THROWS_AS(relmap::validate_config(cfg), std::invalid_argument);

    relmap::PipelineConfig synth;
    synth.task = relmap::TaskKind::Synthetic;
    relmap::apply_task_template(synth);
    synth.features.clear();
    CHECK_THROWS_AS(relmap::validate_config(synth), std::invalid_argument);
}

TEST_CASE("labeled dataset loader error contract") {
    auto dir = fresh_dir("relmap_loader_test");
    auto images = dir / "images";
    fs::create_directories(images);

    // Tiny PNGs for ids a, b, c.
    relmap::RasterImage img(4, 4);
    relmap::write_png(images / "a.png", img);
    relmap::write_png(images / "b.png", img);
    relmap::write_png(images / "c.png", img);

    write_text(dir / "empty.csv", "id,value\n");
    CHECK_THROWS_WITH_AS(relmap::load_labeled_dataset(images, dir / "empty.csv"),
                         doctest::Contains("no samples"), std::invalid_argument);

    write_text(dir / "ok.csv", "id,value\na,1.5\nb,-2\nc,0.25\n");
    auto table = relmap::load_labeled_dataset(images, dir / "ok.csv");
    REQUIRE(table.ids.size() == 3);
    CHECK(table.ids == std::vector<std::string>{"a", "b", "c"});
    CHECK(table.values[1] == doctest::Approx(-2.0));

    write_text(dir / "dup.csv", "a,1\nb,2\na,3\n");
    CHECK_THROWS_WITH_AS(relmap::load_labeled_dataset(images, dir / "dup.csv"),
                         doctest::Contains("rows 1 and 3"), std::invalid_argument);

    write_text(dir / "missing.csv", "a,1\nzz,2\n");
    CHECK_THROWS_WITH_AS(relmap::load_labeled_dataset(images, dir / "missing.csv"),
                         doctest::Contains("row 2"), std::invalid_argument);

    write_text(dir / "bad.csv", "a,1\nb,xyz\n");
    CHECK_THROWS_WITH_AS(relmap::load_labeled_dataset(images, dir / "bad.csv"),
                         doctest::Contains("unparseable"), std::invalid_argument);

    write_text(dir / "surv.csv", "id,time,censored\na,61,0\nb,12,1\nc,80,0\n");
    auto surv = relmap::load_survival_dataset(images, dir / "surv.csv");
    REQUIRE(surv.censored.size() == 3);
    CHECK(surv.censored[1]);

    fs::remove_all(dir);
}

namespace {

relmap::PipelineConfig tiny_synthetic_config(const fs::path& run_dir, std::uint64_t seed) {
    relmap::PipelineConfig cfg;
    cfg.task = relmap::TaskKind::Synthetic;
    relmap::apply_task_template(cfg);
    cfg.seed = seed;
    cfg.run_dir = run_dir;
    cfg.n_train = 20;
    cfg.n_test = 6;
    cfg.features[0].vocabulary = 48;
    cfg.kmeans_max_iters = 12;
    cfg.select_folds = 2;
    cfg.c_grid = {1.0};
    return cfg;
}

} // namespace

TEST_CASE("synthetic pipeline run: layout, replay determinism") {
    auto dir1 = fresh_dir("relmap_run_a");
    auto dir2 = fresh_dir("relmap_run_b");

    auto r1 = relmap::run_pipeline(tiny_synthetic_config(dir1, 2025));
    auto r2 = relmap::run_pipeline(tiny_synthetic_config(dir2, 2025));

    CHECK(fs::exists(dir1 / "config.resolved"));
    CHECK(fs::exists(dir1 / "vocab" / "u0.rvoc"));
    CHECK(fs::exists(dir1 / "grams" / "u0.gram"));
    CHECK(fs::exists(dir1 / "models" / "model.rsvm"));
    CHECK(fs::exists(dir1 / "reports" / "summary.csv"));
    CHECK(fs::exists(dir1 / "reports" / "predictions.csv"));
    CHECK(fs::exists(dir1 / "heatmaps" / "test_00000.ras"));
    CHECK(fs::exists(dir1 / "heatmaps" / "test_00000.png"));

    CHECK(r1.mean_bac == r2.mean_bac);
    CHECK(r1.bac_clean == r2.bac_clean);

    // Byte-identical reports and raw heatmaps across replays.
    for (const char* rel : {"reports/summary.csv", "reports/predictions.csv",
                            "reports/dataset.csv", "heatmaps/test_00000.ras",
                            "heatmaps/test_00002.ras", "heatmaps/test_00000.png"}) {
        CHECK(slurp(dir1 / rel) == slurp(dir2 / rel));
    }

    // On a 20-image toy set the classifier should at least beat chance.
    CHECK(r1.mean_bac >= 0.5);
    CHECK(r1.pooled_quadrats.total() == 6 * 36);

    fs::remove_all(dir1);
    fs::remove_all(dir2);
}

TEST_CASE("lymphocyte run builds six vocabularies") {
    auto dir = fresh_dir("relmap_lymph_data");
    auto images = dir / "images";
    fs::create_directories(images);

    // 12 random 102x102 patches, balanced labels.
    relmap::Rng rng(31);
    std::ostringstream labels;
    labels << "id,value\n";
    for (int i = 0; i < 12; ++i) {
        relmap::RasterImage img(102, 102);
        for (int y = 0; y < 102; ++y) {
            for (int x = 0; x < 102; ++x) {
                img.set_pixel(x, y, static_cast<float>(rng.uniform()),
                              static_cast<float>(rng.uniform()),
                              static_cast<float>(rng.uniform()));
            }
        }
        std::string id = "patch" + std::to_string(i);
        relmap::write_png(images / (id + ".png"), img);
        labels << id << ',' << (i % 2 == 0 ? 1 : -1) << '\n';
    }
    write_text(dir / "labels.csv", labels.str());

    relmap::PipelineConfig cfg;
    cfg.task = relmap::TaskKind::Lymphocyte;
    relmap::apply_task_template(cfg);
    cfg.images_dir = images;
    cfg.labels_csv = dir / "labels.csv";
    cfg.run_dir = dir / "run";
    cfg.seed = 5;
    cfg.outer_folds = 2;
    cfg.kmeans_max_iters = 4;
    for (auto& f : cfg.features) {
        f.vocabulary = 8;
        f.config.grid_stride = 9; // keep the toy run fast
    }

    auto result = relmap::run_pipeline(cfg);
    for (int u = 0; u < 6; ++u) {
        CHECK(fs::exists(cfg.run_dir / "vocab" / ("u" + std::to_string(u) + ".rvoc")));
    }
    CHECK(fs::exists(cfg.run_dir / "models" / "model.rsvm"));
    CHECK(result.mean_bac >= 0.0);

    fs::remove_all(dir);
}
