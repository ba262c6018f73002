#pragma once

#include "relmap/image.hpp"
#include "relmap/stats.hpp"

namespace relmap {

/// 2x2 presence/absence counts over non-overlapping quadrats:
/// both signals / only morphological / only molecular / neither.
struct QuadratTable {
    std::size_t both = 0;
    std::size_t only_morph = 0;
    std::size_t only_molec = 0;
    std::size_t neither = 0;
    int quadrat_side = 0;

    std::size_t total() const { return both + only_morph + only_molec + neither; }

    /// Co-localization ratio (both * neither) / (only_morph * only_molec);
    /// zero cells are replaced by 0.5 for the ratio only (never for chi2).
    double r_cl() const;
};

/// Pearson chi-squared (1 df, no continuity correction) on the 2x2 table.
/// Throws when a marginal is zero.
TestResult quadrat_chi2(const QuadratTable& table);

/// Adds one mask pair to a (possibly pooled) table. Quadrat side =
/// tile_fraction * image width. A quadrat carries a signal when the sum of
/// its pixel values is positive: for binary masks that is "contains any set
/// pixel", for signed relevance planes it means positive evidence dominates
/// the quadrat.
void accumulate_quadrats(QuadratTable& table, const Plane& mask_morph, const Plane& mask_molec,
                         double tile_fraction = 0.10);

struct QuadratOutcome {
    QuadratTable table;
    TestResult test;
};

/// Quadrat co-localization test on one mask pair. Requires at least 4
/// quadrats.
QuadratOutcome quadrat_test(const Plane& mask_morph, const Plane& mask_molec,
                            double tile_fraction = 0.10);

} // namespace relmap
