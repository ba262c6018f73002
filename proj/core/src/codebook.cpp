#include "relmap/codebook.hpp"

#include "relmap/parallel.hpp"
#include "relmap/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <memory>
#include <stdexcept>

namespace relmap {

namespace {

double sq_dist(const float* a, const float* b, int dim) {
    float s0 = 0.0f, s1 = 0.0f, s2 = 0.0f, s3 = 0.0f;
    int d = 0;
    for (; d + 4 <= dim; d += 4) {
        float d0 = a[d] - b[d];
        float d1 = a[d + 1] - b[d + 1];
        float d2 = a[d + 2] - b[d + 2];
        float d3 = a[d + 3] - b[d + 3];
        s0 += d0 * d0;
        s1 += d1 * d1;
        s2 += d2 * d2;
        s3 += d3 * d3;
    }
    double s = static_cast<double>(s0) + s1 + s2 + s3;
    for (; d < dim; ++d) {
        double diff = static_cast<double>(a[d]) - b[d];
        s += diff * diff;
    }
    return s;
}

} // namespace

Vocabulary kmeans_train(const DescriptorSet& descriptors, const MetricWeights& metric, int k,
                        const KmeansOptions& opts) {
    const std::size_t n = descriptors.count();
    const int dim = descriptors.dim;
    if (k < 1) throw std::invalid_argument("kmeans_train: k must be >= 1");
    if (n < static_cast<std::size_t>(k)) {
        throw std::invalid_argument("kmeans_train: need at least k descriptors");
    }
    if (static_cast<int>(metric.w.size()) != dim) {
        throw std::invalid_argument("kmeans_train: metric weight dimension mismatch");
    }

    // Scale once into metric space; everything below is plain l2.
    std::vector<float> pts(n * static_cast<std::size_t>(dim));
    for (std::size_t i = 0; i < n; ++i) {
        auto row = descriptors.row(i);
        for (int d = 0; d < dim; ++d) {
            pts[i * dim + d] = row[d] * metric.w[d];
        }
    }
    auto pt = [&](std::size_t i) { return pts.data() + i * dim; };

    Rng rng(opts.seed);
    std::vector<float> centers(static_cast<std::size_t>(k) * dim);
    auto ctr = [&](int j) { return centers.data() + static_cast<std::size_t>(j) * dim; };

    // k-means++ seeding.
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());
    std::size_t first = rng.uniform_index(n);
    std::copy_n(pt(first), dim, ctr(0));
    for (int j = 1; j < k; ++j) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double d = sq_dist(pt(i), ctr(j - 1), dim);
            if (d < d2[i]) d2[i] = d;
            total += d2[i];
        }
        if (total <= 0.0) {
            throw std::invalid_argument("kmeans_train: fewer distinct points than k");
        }
        double r = rng.uniform() * total;
        double acc = 0.0;
        std::size_t chosen = n - 1;
        for (std::size_t i = 0; i < n; ++i) {
            acc += d2[i];
            if (acc >= r) {
                chosen = i;
                break;
            }
        }
        std::copy_n(pt(chosen), dim, ctr(j));
    }

    std::vector<int> assign(n, -1);
    std::vector<double> point_d2(n, 0.0);
    std::vector<double> sums(static_cast<std::size_t>(k) * dim);
    std::vector<std::size_t> counts(k);

    double prev_distortion = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < opts.max_iters; ++iter) {
        parallel_for(n, [&](std::size_t i) {
            const float* p = pt(i);
            double best = std::numeric_limits<double>::infinity();
            int best_j = 0;
            for (int j = 0; j < k; ++j) {
                double d = sq_dist(p, ctr(j), dim);
                if (d < best) {
                    best = d;
                    best_j = j;
                }
            }
            assign[i] = best_j;
            point_d2[i] = best;
        });

        double distortion = 0.0;
        for (std::size_t i = 0; i < n; ++i) distortion += point_d2[i];
        if (distortion > prev_distortion * (1.0 + 1e-9)) {
            throw std::logic_error("kmeans_train: distortion increased");
        }
        bool converged = prev_distortion - distortion <= opts.rel_tol * prev_distortion;
        prev_distortion = distortion;

        std::fill(sums.begin(), sums.end(), 0.0);
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            int j = assign[i];
            ++counts[j];
            const float* p = pt(i);
            double* s = sums.data() + static_cast<std::size_t>(j) * dim;
            for (int d = 0; d < dim; ++d) s[d] += p[d];
        }
        for (int j = 0; j < k; ++j) {
            if (counts[j] == 0) {
                // Re-seed an empty cluster on the point farthest from its center.
                std::size_t far = 0;
                double far_d = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    if (counts[assign[i]] > 1 && point_d2[i] > far_d) {
                        far_d = point_d2[i];
                        far = i;
                    }
                }
                --counts[assign[far]];
                double* old_s = sums.data() + static_cast<std::size_t>(assign[far]) * dim;
                const float* p = pt(far);
                for (int d = 0; d < dim; ++d) old_s[d] -= p[d];
                assign[far] = j;
                counts[j] = 1;
                double* s = sums.data() + static_cast<std::size_t>(j) * dim;
                for (int d = 0; d < dim; ++d) s[d] = p[d];
                converged = false;
            }
            double* s = sums.data() + static_cast<std::size_t>(j) * dim;
            float* c = ctr(j);
            for (int d = 0; d < dim; ++d) {
                c[d] = static_cast<float>(s[d] / static_cast<double>(counts[j]));
            }
        }
        if (converged) break;
    }

    Vocabulary vocab;
    vocab.kind = descriptors.kind;
    vocab.dim = dim;
    vocab.k = k;
    vocab.seed = opts.seed;
    vocab.centers = std::move(centers);
    vocab.weights = metric.w;
    return vocab;
}

WordMapping rank_soft_map(std::span<const float> descriptor, const Vocabulary& vocab,
                          int cutoff) {
    if (static_cast<int>(descriptor.size()) != vocab.dim) {
        throw std::invalid_argument("rank_soft_map: descriptor dimension mismatch");
    }
    if (cutoff < 1 || cutoff > 8) throw std::invalid_argument("rank_soft_map: cutoff must be in 1..8");

    bool unit = true;
    for (float w : vocab.weights) {
        if (w != 1.0f) {
            unit = false;
            break;
        }
    }
    std::vector<float> scaled;
    const float* query = descriptor.data();
    if (!unit) {
        scaled.resize(vocab.dim);
        for (int d = 0; d < vocab.dim; ++d) scaled[d] = descriptor[d] * vocab.weights[d];
        query = scaled.data();
    }

    const int keep = std::min(cutoff, vocab.k);
    // Insertion into a small sorted candidate list; ties favor lower index.
    std::array<double, 8> best_d;
    std::array<std::uint32_t, 8> best_i;
    best_d.fill(std::numeric_limits<double>::infinity());
    best_i.fill(0);
    for (int j = 0; j < vocab.k; ++j) {
        double d = sq_dist(query, vocab.center(j).data(), vocab.dim);
        if (d >= best_d[keep - 1]) continue;
        int pos = keep - 1;
        while (pos > 0 && d < best_d[pos - 1]) {
            best_d[pos] = best_d[pos - 1];
            best_i[pos] = best_i[pos - 1];
            --pos;
        }
        best_d[pos] = d;
        best_i[pos] = static_cast<std::uint32_t>(j);
    }

    WordMapping m;
    m.count = keep;
    for (int r = 0; r < keep; ++r) {
        m.word[r] = best_i[r];
        m.weight[r] = std::ldexp(1.0f, -(r + 1)); // 2^-(rank)
    }
    return m;
}

std::vector<WordMapping> rank_soft_map_all(const DescriptorSet& set, const Vocabulary& vocab,
                                           int cutoff) {
    std::vector<WordMapping> out(set.count());
    parallel_for(set.count(), [&](std::size_t i) {
        out[i] = rank_soft_map(set.row(i), vocab, cutoff);
    });
    return out;
}

double BowVector::l1() const {
    double s = 0.0;
    for (double v : values) s += std::abs(v);
    return s;
}

BowVector bow_from_tile(const std::vector<WordMapping>& mappings, int vocabulary_size) {
    BowVector bow;
    bow.values.assign(vocabulary_size, 0.0);
    if (mappings.empty()) {
        bow.empty = true;
        return bow;
    }
    for (const WordMapping& m : mappings) {
        for (int r = 0; r < m.count; ++r) bow.values[m.word[r]] += m.weight[r];
    }
    double norm = bow.l1();
    if (norm <= 0.0) {
        bow.empty = true;
        return bow;
    }
    for (double& v : bow.values) v /= norm;
    return bow;
}

BowVector average_bow(const std::vector<BowVector>& tile_bows) {
    if (tile_bows.empty()) throw std::invalid_argument("average_bow: no tiles");
    BowVector out;
    std::size_t used = 0;
    for (const BowVector& b : tile_bows) {
        if (b.empty) continue;
        if (out.values.empty()) out.values.assign(b.values.size(), 0.0);
        if (b.values.size() != out.values.size()) {
            throw std::invalid_argument("average_bow: mixed vocabulary sizes");
        }
        for (std::size_t d = 0; d < b.values.size(); ++d) out.values[d] += b.values[d];
        ++used;
    }
    if (used == 0) throw std::invalid_argument("average_bow: all tiles empty");
    for (double& v : out.values) v /= static_cast<double>(used);
    return out;
}

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void write_exact(std::FILE* f, const void* p, std::size_t bytes) {
    if (std::fwrite(p, 1, bytes, f) != bytes) throw std::runtime_error("short write");
}

void read_exact(std::FILE* f, void* p, std::size_t bytes) {
    if (std::fread(p, 1, bytes, f) != bytes) throw std::runtime_error("short read");
}

} // namespace

void write_vocabulary(const std::filesystem::path& path, const Vocabulary& vocab) {
    FilePtr fp(std::fopen(path.string().c_str(), "wb"));
    if (!fp) throw std::runtime_error("cannot open vocabulary for writing: " + path.string());
    write_exact(fp.get(), "RVOC", 4);
    std::uint32_t version = 1;
    std::uint32_t kind_len = static_cast<std::uint32_t>(vocab.kind.size());
    std::uint32_t k = static_cast<std::uint32_t>(vocab.k);
    std::uint32_t dim = static_cast<std::uint32_t>(vocab.dim);
    write_exact(fp.get(), &version, 4);
    write_exact(fp.get(), &kind_len, 4);
    write_exact(fp.get(), vocab.kind.data(), kind_len);
    write_exact(fp.get(), &k, 4);
    write_exact(fp.get(), &dim, 4);
    write_exact(fp.get(), &vocab.seed, 8);
    write_exact(fp.get(), vocab.centers.data(), vocab.centers.size() * 4);
    write_exact(fp.get(), vocab.weights.data(), vocab.weights.size() * 4);
}

Vocabulary read_vocabulary(const std::filesystem::path& path) {
    FilePtr fp(std::fopen(path.string().c_str(), "rb"));
    if (!fp) throw std::runtime_error("cannot open vocabulary for reading: " + path.string());
    char magic[4];
    read_exact(fp.get(), magic, 4);
    if (std::memcmp(magic, "RVOC", 4) != 0) {
        throw std::runtime_error("bad vocabulary magic in " + path.string());
    }
    std::uint32_t version = 0, kind_len = 0, k = 0, dim = 0;
    read_exact(fp.get(), &version, 4);
    if (version != 1) throw std::runtime_error("unsupported vocabulary version");
    read_exact(fp.get(), &kind_len, 4);
    Vocabulary vocab;
    vocab.kind.resize(kind_len);
    read_exact(fp.get(), vocab.kind.data(), kind_len);
    read_exact(fp.get(), &k, 4);
    read_exact(fp.get(), &dim, 4);
    read_exact(fp.get(), &vocab.seed, 8);
    vocab.k = static_cast<int>(k);
    vocab.dim = static_cast<int>(dim);
    vocab.centers.resize(static_cast<std::size_t>(k) * dim);
    vocab.weights.resize(dim);
    read_exact(fp.get(), vocab.centers.data(), vocab.centers.size() * 4);
    read_exact(fp.get(), vocab.weights.data(), vocab.weights.size() * 4);
    return vocab;
}

} // namespace relmap
