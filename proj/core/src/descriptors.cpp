#include "relmap/descriptors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace relmap {

std::string kind_name(DescriptorKind k) {
    switch (k) {
        case DescriptorKind::Sift: return "sift";
        case DescriptorKind::Gnq: return "gnq";
        case DescriptorKind::Ciq: return "ciq";
    }
    return "?";
}

DescriptorKind kind_from_name(const std::string& name) {
    if (name == "sift") return DescriptorKind::Sift;
    if (name == "gnq") return DescriptorKind::Gnq;
    if (name == "ciq") return DescriptorKind::Ciq;
    throw std::invalid_argument("unknown descriptor kind: " + name);
}

int kind_dimension(DescriptorKind k) {
    switch (k) {
        case DescriptorKind::Sift: return 128;
        case DescriptorKind::Gnq: return 18;
        case DescriptorKind::Ciq: return 18;
    }
    return 0;
}

int FeatureConfig::dimension() const {
    int per_channel = 0;
    for (DescriptorKind k : parts) per_channel += kind_dimension(k);
    return per_channel * static_cast<int>(channels.size());
}

std::vector<int> FeatureConfig::block_dims() const {
    std::vector<int> dims;
    for (std::size_t c = 0; c < channels.size(); ++c) {
        for (DescriptorKind k : parts) dims.push_back(kind_dimension(k));
    }
    return dims;
}

std::string FeatureConfig::name() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) os << '+';
        os << kind_name(parts[i]);
    }
    os << '/';
    for (std::size_t i = 0; i < channels.size(); ++i) {
        if (i) os << '+';
        os << channel_name(channels[i]);
    }
    os << "/s" << scale;
    return os.str();
}

void DescriptorSet::append(const Keypoint& kp, std::span<const float> v) {
    if (static_cast<int>(v.size()) != dim) {
        throw std::invalid_argument("DescriptorSet::append: dimension mismatch");
    }
    keypoints.push_back(kp);
    values.insert(values.end(), v.begin(), v.end());
}

ImageContext make_image_context(const RasterImage& img, const std::vector<ColorChannel>& channels) {
    ImageContext ctx;
    ctx.planes = color_transform(img, channels);
    ctx.fields.reserve(ctx.planes.size());
    for (const Plane& p : ctx.planes) ctx.fields.push_back(sobel_gradients(p));
    ctx.grey_field = sobel_gradients(color_transform(img, ColorChannel::Grey));
    return ctx;
}

double quantile_estimate(double q, std::span<const double> sorted_values) {
    if (sorted_values.empty()) {
        throw std::invalid_argument("quantile_estimate: empty value set");
    }
    if (q < 0.0 || q > 1.0) {
        throw std::invalid_argument("quantile_estimate: q must be in [0,1]");
    }
    const std::size_t n = sorted_values.size();
    const double idx = q * static_cast<double>(n - 1);
    const std::size_t lo = static_cast<std::size_t>(idx);
    const double frac = idx - static_cast<double>(lo);
    if (lo + 1 >= n) return sorted_values[n - 1];
    return (1.0 - frac) * sorted_values[lo] + frac * sorted_values[lo + 1];
}

std::vector<float> quantile_descriptor(QuantileSource source, const GradientField& field,
                                       const Plane& plane, const Keypoint& kp,
                                       double orientation) {
    const int r = static_cast<int>(std::floor(kp.radius));
    const double r2 = kp.radius * kp.radius;
    const int cx = static_cast<int>(std::lround(kp.x));
    const int cy = static_cast<int>(std::lround(kp.y));
    const double ox = std::cos(orientation);
    const double oy = std::sin(orientation);

    std::vector<double> positive, negative;
    for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
            if (dx * dx + dy * dy > r2) continue;
            int px = cx + dx;
            int py = cy + dy;
            double v = source == QuantileSource::GradientNorms
                           ? field.norm_at(px, py)
                           : plane.at(px, py);
            // Ties on the dividing line go to the positive side.
            if (dx * ox + dy * oy >= 0.0) {
                positive.push_back(v);
            } else {
                negative.push_back(v);
            }
        }
    }
    if (positive.empty() || negative.empty()) {
        throw std::invalid_argument("quantile_descriptor: empty half circle (radius too small)");
    }
    std::sort(positive.begin(), positive.end());
    std::sort(negative.begin(), negative.end());

    std::vector<float> out;
    out.reserve(18);
    for (int i = 1; i <= 9; ++i) {
        out.push_back(static_cast<float>(quantile_estimate(i / 10.0, positive)));
    }
    for (int i = 1; i <= 9; ++i) {
        out.push_back(static_cast<float>(quantile_estimate(i / 10.0, negative)));
    }
    return out;
}

DescriptorSet extract_tile_descriptors(const ImageContext& ctx, const FeatureConfig& cfg,
                                       const Tile& tile) {
    DescriptorSet set;
    set.kind = cfg.name();
    set.dim = cfg.dimension();

    std::vector<Keypoint> kps = dense_keypoints(tile, cfg.grid_stride, {cfg.scale});
    std::vector<float> row;
    row.reserve(set.dim);
    for (const Keypoint& kp : kps) {
        DominantOrientation ori = dominant_orientation(ctx.grey_field, kp);
        row.clear();
        for (std::size_t c = 0; c < ctx.planes.size(); ++c) {
            for (DescriptorKind k : cfg.parts) {
                switch (k) {
                    case DescriptorKind::Sift: {
                        auto v = sift_descriptor(ctx.fields[c], kp, ori.angle);
                        row.insert(row.end(), v.begin(), v.end());
                        break;
                    }
                    case DescriptorKind::Gnq: {
                        auto v = quantile_descriptor(QuantileSource::GradientNorms, ctx.fields[c],
                                                     ctx.planes[c], kp, ori.angle);
                        row.insert(row.end(), v.begin(), v.end());
                        break;
                    }
                    case DescriptorKind::Ciq: {
                        auto v = quantile_descriptor(QuantileSource::Intensities, ctx.fields[c],
                                                     ctx.planes[c], kp, ori.angle);
                        row.insert(row.end(), v.begin(), v.end());
                        break;
                    }
                }
            }
        }
        set.append(kp, row);
    }
    return set;
}

MetricWeights compute_metric_weights(const DescriptorSet& sample, const std::vector<int>& block_dims) {
    if (sample.count() == 0) {
        throw std::invalid_argument("compute_metric_weights: empty sample");
    }
    const int dim = sample.dim;
    if (std::accumulate(block_dims.begin(), block_dims.end(), 0) != dim) {
        throw std::invalid_argument("compute_metric_weights: block dims do not sum to descriptor dim");
    }
    const std::size_t n = sample.count();
    std::vector<double> mean(dim, 0.0), m2(dim, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        auto row = sample.row(i);
        for (int d = 0; d < dim; ++d) {
            double delta = row[d] - mean[d];
            mean[d] += delta / static_cast<double>(i + 1);
            m2[d] += delta * (row[d] - mean[d]);
        }
    }
    MetricWeights mw;
    mw.w.resize(dim);
    int d = 0;
    for (int block : block_dims) {
        for (int j = 0; j < block; ++j, ++d) {
            double sd = std::sqrt(m2[d] / static_cast<double>(n));
            if (sd <= 0.0) {
                mw.w[d] = 0.0f;
                ++mw.zeroed_dims;
            } else {
                mw.w[d] = static_cast<float>(1.0 / (sd * block));
            }
        }
    }
    return mw;
}

MetricWeights unit_metric_weights(int dim) {
    MetricWeights mw;
    mw.w.assign(dim, 1.0f);
    return mw;
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

void write_descriptors(const std::filesystem::path& path, const DescriptorSet& set) {
    FilePtr fp(std::fopen(path.string().c_str(), "wb"));
    if (!fp) throw std::runtime_error("cannot open descriptor file for writing: " + path.string());
    write_exact(fp.get(), "RDSC", 4);
    std::uint32_t version = 1;
    write_exact(fp.get(), &version, 4);
    std::uint32_t kind_len = static_cast<std::uint32_t>(set.kind.size());
    write_exact(fp.get(), &kind_len, 4);
    write_exact(fp.get(), set.kind.data(), kind_len);
    std::uint32_t dim = static_cast<std::uint32_t>(set.dim);
    std::uint64_t count = set.count();
    write_exact(fp.get(), &dim, 4);
    write_exact(fp.get(), &count, 8);
    for (const Keypoint& kp : set.keypoints) {
        float rec[4] = {static_cast<float>(kp.x), static_cast<float>(kp.y),
                        static_cast<float>(kp.scale), static_cast<float>(kp.radius)};
        write_exact(fp.get(), rec, sizeof(rec));
    }
    write_exact(fp.get(), set.values.data(), set.values.size() * 4);
}

DescriptorSet read_descriptors(const std::filesystem::path& path) {
    FilePtr fp(std::fopen(path.string().c_str(), "rb"));
    if (!fp) throw std::runtime_error("cannot open descriptor file for reading: " + path.string());
    char magic[4];
    read_exact(fp.get(), magic, 4);
    if (std::memcmp(magic, "RDSC", 4) != 0) {
        throw std::runtime_error("bad descriptor magic in " + path.string());
    }
    std::uint32_t version = 0, kind_len = 0, dim = 0;
    std::uint64_t count = 0;
    read_exact(fp.get(), &version, 4);
    if (version != 1) throw std::runtime_error("unsupported descriptor version");
    read_exact(fp.get(), &kind_len, 4);
    std::string kind(kind_len, '\0');
    read_exact(fp.get(), kind.data(), kind_len);
    read_exact(fp.get(), &dim, 4);
    read_exact(fp.get(), &count, 8);

    DescriptorSet set;
    set.kind = kind;
    set.dim = static_cast<int>(dim);
    set.keypoints.resize(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        float rec[4];
        read_exact(fp.get(), rec, sizeof(rec));
        set.keypoints[i] = Keypoint{rec[0], rec[1], rec[2], rec[3]};
    }
    set.values.resize(count * dim);
    read_exact(fp.get(), set.values.data(), set.values.size() * 4);
    return set;
}

} // namespace relmap
