#pragma once

#include <Eigen/Dense>

#include "clusterfx/ranks.hpp"

namespace clusterfx {

// Relative treatment effects of every cell against the unweighted mean
// distribution of all 2T cells, in lexicographic cell order.
struct EffectEstimate {
    int num_groups = 0;
    long long n_total = 0;
    Eigen::VectorXd p;       // length 2T, each entry in [0,1], mean 1/2
    PairwiseEffects w_hat;   // retained for covariance estimation
};

EffectEstimate estimate_p(const StudyData& data);
EffectEstimate estimate_p(const StudyData& data, PairwiseEffects w);

// Additive decomposition of the effect vector into group, period and
// interaction components, mirroring the classical cell-mean decomposition.
// All side conditions hold: components of alpha and beta sum to zero and
// every row and column of alphabeta sums to zero.
struct EffectDecomposition {
    Eigen::VectorXd alpha;      // length T
    Eigen::Vector2d beta;
    Eigen::MatrixXd alphabeta;  // T x 2
};

// p_hat must have length 2*num_groups; reconstruction
// alpha_j + beta_l + alphabeta(j,l) + 1/2 = p(j,l) is exact.
EffectDecomposition decompose(const Eigen::VectorXd& p_hat, int num_groups);

}  // namespace clusterfx
