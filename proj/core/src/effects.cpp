#include "clusterfx/effects.hpp"

#include <utility>

namespace clusterfx {

EffectEstimate estimate_p(const StudyData& data, PairwiseEffects w) {
    EffectEstimate est;
    est.num_groups = data.num_groups();
    est.n_total = data.total_count();
    // p(b) averages the effects of cell b against every cell, i.e. against
    // the unweighted pooled distribution.
    est.p = w.w.colwise().mean().transpose();
    est.w_hat = std::move(w);
    return est;
}

EffectEstimate estimate_p(const StudyData& data) { return estimate_p(data, pairwise_w(data)); }

EffectDecomposition decompose(const Eigen::VectorXd& p_hat, int num_groups) {
    if (p_hat.size() != 2 * num_groups) {
        throw DimensionError("effect vector has length " + std::to_string(p_hat.size()) +
                             ", expected " + std::to_string(2 * num_groups));
    }
    const int t = num_groups;
    Eigen::MatrixXd grid(t, 2);
    for (int j = 0; j < t; ++j)
        for (int l = 0; l < 2; ++l) grid(j, l) = p_hat(2 * j + l);

    const double overall = grid.mean();
    const Eigen::VectorXd row_means = grid.rowwise().mean();
    const Eigen::RowVector2d col_means = grid.colwise().mean();

    EffectDecomposition d;
    d.alpha = row_means.array() - overall;
    d.beta = (col_means.array() - overall).transpose();
    d.alphabeta.resize(t, 2);
    for (int j = 0; j < t; ++j)
        for (int l = 0; l < 2; ++l)
            d.alphabeta(j, l) = grid(j, l) - row_means(j) - col_means(l) + overall;
    return d;
}

}  // namespace clusterfx
