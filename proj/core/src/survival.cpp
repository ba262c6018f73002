#include "relmap/survival.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace relmap {

namespace {

KaplanMeier kaplan_meier(const std::vector<double>& times, const std::vector<bool>& event,
                         const std::vector<int>& group, int which) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < group.size(); ++i) {
        if (group[i] == which) members.push_back(i);
    }
    std::sort(members.begin(), members.end(),
              [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });

    KaplanMeier km;
    double s = 1.0;
    std::size_t at_risk = members.size();
    std::size_t i = 0;
    while (i < members.size()) {
        double t = times[members[i]];
        std::size_t deaths = 0, censored = 0;
        while (i < members.size() && times[members[i]] == t) {
            if (event[members[i]]) ++deaths;
            else ++censored;
            ++i;
        }
        if (deaths > 0) {
            s *= 1.0 - static_cast<double>(deaths) / static_cast<double>(at_risk);
            km.times.push_back(t);
            km.survival.push_back(s);
        }
        if (censored > 0) km.censor_times.push_back(t);
        at_risk -= deaths + censored;
    }
    return km;
}

} // namespace

LogRankResult logrank_test(const std::vector<double>& times, const std::vector<bool>& event,
                           const std::vector<int>& group) {
    const std::size_t n = times.size();
    if (event.size() != n || group.size() != n) {
        throw std::invalid_argument("logrank_test: size mismatch");
    }
    std::size_t n_a = 0, n_b = 0, n_events = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (group[i] == +1) ++n_a;
        else if (group[i] == -1) ++n_b;
        else throw std::invalid_argument("logrank_test: groups must be +1/-1");
        if (event[i]) ++n_events;
    }
    if (n_a == 0 || n_b == 0) throw std::invalid_argument("logrank_test: empty group");
    if (n_events == 0) throw std::invalid_argument("logrank_test: no events");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });

    double observed_a = 0.0, expected_a = 0.0, variance = 0.0;
    std::size_t risk_a = n_a, risk_b = n_b;
    std::size_t i = 0;
    while (i < n) {
        double t = times[order[i]];
        std::size_t d = 0, d_a = 0, removed_a = 0, removed_b = 0;
        while (i < n && times[order[i]] == t) {
            std::size_t idx = order[i];
            if (event[idx]) {
                ++d;
                if (group[idx] == +1) ++d_a;
            }
            if (group[idx] == +1) ++removed_a;
            else ++removed_b;
            ++i;
        }
        std::size_t risk = risk_a + risk_b;
        if (d > 0 && risk > 1) {
            double ra = static_cast<double>(risk_a);
            double rn = static_cast<double>(risk);
            double dd = static_cast<double>(d);
            observed_a += static_cast<double>(d_a);
            expected_a += dd * ra / rn;
            variance += dd * (ra / rn) * (1.0 - ra / rn) * (rn - dd) / (rn - 1.0);
        }
        risk_a -= removed_a;
        risk_b -= removed_b;
    }

    LogRankResult out;
    out.observed_a = observed_a;
    out.expected_a = expected_a;
    double diff = observed_a - expected_a;
    if (variance <= 0.0) {
        if (std::abs(diff) > 1e-12) {
            throw std::runtime_error("logrank_test: zero variance with nonzero deviation");
        }
        out.statistic = 0.0;
    } else {
        out.statistic = diff * diff / variance;
    }
    out.test = chi2_sf_1df(out.statistic);
    out.km_a = kaplan_meier(times, event, group, +1);
    out.km_b = kaplan_meier(times, event, group, -1);
    return out;
}

} // namespace relmap
