#include "relmap/quadrat.hpp"

#include <cmath>
#include <stdexcept>

namespace relmap {

double QuadratTable::r_cl() const {
    auto guarded = [](std::size_t v) { return v == 0 ? 0.5 : static_cast<double>(v); };
    return guarded(both) * guarded(neither) / (guarded(only_morph) * guarded(only_molec));
}

TestResult quadrat_chi2(const QuadratTable& table) {
    const double a = static_cast<double>(table.both);
    const double b = static_cast<double>(table.only_morph);
    const double c = static_cast<double>(table.only_molec);
    const double d = static_cast<double>(table.neither);
    const double n = a + b + c + d;
    const double r1 = a + b, r2 = c + d, c1 = a + c, c2 = b + d;
    if (r1 <= 0.0 || r2 <= 0.0 || c1 <= 0.0 || c2 <= 0.0) {
        throw std::invalid_argument("quadrat_chi2: zero marginal, statistic undefined");
    }
    const double diff = a * d - b * c;
    const double chi2 = n * diff * diff / (r1 * r2 * c1 * c2);
    return chi2_sf_1df(chi2);
}

void accumulate_quadrats(QuadratTable& table, const Plane& mask_morph, const Plane& mask_molec,
                         double tile_fraction) {
    if (mask_morph.width != mask_molec.width || mask_morph.height != mask_molec.height) {
        throw std::invalid_argument("accumulate_quadrats: masks must share geometry");
    }
    if (tile_fraction <= 0.0 || tile_fraction > 1.0) {
        throw std::invalid_argument("accumulate_quadrats: tile_fraction must be in (0,1]");
    }
    const int side = std::max(1, static_cast<int>(std::lround(tile_fraction * mask_morph.width)));
    if (table.quadrat_side == 0) table.quadrat_side = side;

    const int nx = mask_morph.width / side;
    const int ny = mask_morph.height / side;
    for (int qy = 0; qy < ny; ++qy) {
        for (int qx = 0; qx < nx; ++qx) {
            double morph_sum = 0.0, molec_sum = 0.0;
            for (int y = qy * side; y < (qy + 1) * side; ++y) {
                for (int x = qx * side; x < (qx + 1) * side; ++x) {
                    morph_sum += mask_morph.at(x, y);
                    molec_sum += mask_molec.at(x, y);
                }
            }
            bool morph = morph_sum > 0.0;
            bool molec = molec_sum > 0.0;
            if (morph && molec) ++table.both;
            else if (morph) ++table.only_morph;
            else if (molec) ++table.only_molec;
            else ++table.neither;
        }
    }
}

QuadratOutcome quadrat_test(const Plane& mask_morph, const Plane& mask_molec,
                            double tile_fraction) {
    QuadratOutcome out;
    accumulate_quadrats(out.table, mask_morph, mask_molec, tile_fraction);
    if (out.table.total() < 4) {
        throw std::invalid_argument("quadrat_test: fewer than 4 quadrats");
    }
    out.test = quadrat_chi2(out.table);
    return out;
}

} // namespace relmap
