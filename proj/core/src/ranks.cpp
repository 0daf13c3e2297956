#include "clusterfx/ranks.hpp"

#include <algorithm>
#include <numeric>

namespace clusterfx {

std::vector<double> midranks(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return values[static_cast<std::size_t>(a)] <
                                         values[static_cast<std::size_t>(b)]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t k = i + 1;
        const double v = values[static_cast<std::size_t>(order[i])];
        while (k < n && values[static_cast<std::size_t>(order[k])] == v) ++k;
        // positions i..k-1 share ranks i+1..k; assign their average
        const double r = 0.5 * static_cast<double>(i + 1 + k);
        for (std::size_t m = i; m < k; ++m) ranks[static_cast<std::size_t>(order[m])] = r;
        i = k;
    }
    return ranks;
}

double ecdf_sorted(const std::vector<double>& sorted, double x) {
    const auto lo = std::lower_bound(sorted.begin(), sorted.end(), x);
    const auto hi = std::upper_bound(lo, sorted.end(), x);
    const double below = static_cast<double>(lo - sorted.begin());
    const double equal = static_cast<double>(hi - lo);
    return (below + 0.5 * equal) / static_cast<double>(sorted.size());
}

double ecdf_eval(const StudyData& data, int j, int l, double x) {
    const std::vector<double>& cell = data.sorted_cell(j, l);
    if (cell.empty()) throw EmptyCellError(j + 1, l + 1);
    return ecdf_sorted(cell, x);
}

namespace {

// Pooled mid-rank comparison of two sorted samples. Returns the estimate of
// P(B > A) + P(B = A)/2 via the difference of mean ranks.
double rank_effect(const std::vector<double>& a, const std::vector<double>& b) {
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    double sum_a = 0.0, sum_b = 0.0;
    std::size_t i = 0, j = 0, pos = 0;
    while (i < a.size() || j < b.size()) {
        double v;
        if (i < a.size() && (j == b.size() || a[i] <= b[j])) v = a[i];
        else v = b[j];
        std::size_t ca = 0, cb = 0;
        while (i < a.size() && a[i] == v) { ++i; ++ca; }
        while (j < b.size() && b[j] == v) { ++j; ++cb; }
        const std::size_t g = ca + cb;
        // tied block occupies ranks pos+1 .. pos+g
        const double mid = static_cast<double>(pos) + 0.5 * static_cast<double>(g + 1);
        sum_a += static_cast<double>(ca) * mid;
        sum_b += static_cast<double>(cb) * mid;
        pos += g;
    }
    const double w = (sum_b / nb - sum_a / na) / (na + nb) + 0.5;
    return std::clamp(w, 0.0, 1.0);
}

}  // namespace

PairwiseEffects pairwise_w(const StudyData& data) {
    const int cells = data.num_cells();
    PairwiseEffects eff;
    eff.num_groups = data.num_groups();
    eff.w.resize(cells, cells);
    for (int a = 0; a < cells; ++a) eff.w(a, a) = 0.5;
    for (int a = 0; a < cells; ++a) {
        const std::vector<double>& sa = data.sorted_cell(a / 2, a % 2);
        for (int b = a + 1; b < cells; ++b) {
            const std::vector<double>& sb = data.sorted_cell(b / 2, b % 2);
            const double w_ab = rank_effect(sa, sb);
            eff.w(a, b) = w_ab;
            eff.w(b, a) = 1.0 - w_ab;
        }
    }
    return eff;
}

}  // namespace clusterfx
