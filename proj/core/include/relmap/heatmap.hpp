#pragma once

#include "relmap/image.hpp"
#include "relmap/keypoints.hpp"
#include "relmap/tiling.hpp"

#include <vector>

namespace relmap {

/// Local-feature relevance of one tile: keypoints across all of the tile's
/// BoW features with their redistributed scores R(l).
struct TileRelevance {
    Tile tile;
    std::vector<Keypoint> keypoints;
    std::vector<double> relevance;
};

/// Whether tile scores are normalized by their own max |rel| before the
/// cross-tile mean (the default) or only once globally at the end.
enum class TileNormalization { PerTileThenGlobal, GlobalOnly };

/// Raw pixel relevance of one tile: rel(p) = sum of R(l) over local features
/// whose disc covers p. Buffer is tile.side^2, tile-local coordinates.
std::vector<double> tile_pixel_relevance(const TileRelevance& tile);

/// Whole-image heatmap: per-tile pixel relevance, per-tile normalization,
/// per-pixel mean over all tiles containing the pixel, then one global
/// normalization into [-1,+1]. All-zero relevance yields an all-zero map.
Plane pixel_heatmap(int width, int height, const std::vector<TileRelevance>& tiles,
                    TileNormalization mode = TileNormalization::PerTileThenGlobal);

/// Diverging colormap: -1 blue, 0 green, +0.5 yellow, +1 red.
void heatmap_color(float value, float& r, float& g, float& b);

/// Rendered heatmap, optionally alpha-blended over the grayscale base image.
/// Heatmap values must lie in [-1, 1]; base must match the heatmap size.
RasterImage render_heatmap(const Plane& heatmap, const RasterImage* base = nullptr,
                           float overlay_alpha = 0.6f);

} // namespace relmap
