#pragma once

#include "relmap/stats.hpp"

#include <vector>

namespace relmap {

/// Kaplan-Meier step function for one group. `times`/`survival` hold the
/// curve after each event time (starting implicitly at S(0)=1);
/// `censor_times` mark censored subjects for plotting.
struct KaplanMeier {
    std::vector<double> times;
    std::vector<double> survival;
    std::vector<double> censor_times;
};

struct LogRankResult {
    double statistic = 0.0; // chi-squared, 1 df
    TestResult test;        // two-sided p
    double observed_a = 0.0;
    double expected_a = 0.0;
    KaplanMeier km_a;
    KaplanMeier km_b;
};

/// Two-group log-rank test. `event[i]` is true when the event occurred
/// (false = censored); `group[i]` is +1 (group a) or -1 (group b).
LogRankResult logrank_test(const std::vector<double>& times, const std::vector<bool>& event,
                           const std::vector<int>& group);

} // namespace relmap
