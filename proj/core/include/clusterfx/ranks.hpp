#pragma once

#include <Eigen/Dense>
#include <vector>

#include "clusterfx/data.hpp"

namespace clusterfx {

// Normalized count function: 0 below zero, 1/2 at zero, 1 above.
inline double normalized_count(double u) { return u < 0.0 ? 0.0 : (u > 0.0 ? 1.0 : 0.5); }

// Mid-ranks of `values`: tied entries receive the average of the ranks they
// would occupy, so the ranks always sum to n(n+1)/2 exactly.
std::vector<double> midranks(const std::vector<double>& values);

// Normalized empirical distribution function of cell (j,l) at x: the average
// of the left- and right-continuous ECDF versions, pooling complete and
// incomplete clusters with observation-count weights. Jumps by half-weights
// at atoms. j, l are 0-based.
double ecdf_eval(const StudyData& data, int j, int l, double x);

// Evaluates the normalized ECDF of a sorted sample at x.
double ecdf_sorted(const std::vector<double>& sorted, double x);

// Pairwise relative effects between all cell pairs.
//
// w(a, b) estimates the probability that a draw from cell b exceeds an
// independent draw from cell a, plus half the tie probability; rows and
// columns use the lexicographic cell order of StudyData. The matrix satisfies
// w(a,b) + w(b,a) == 1 entrywise exactly and w(a,a) == 1/2.
struct PairwiseEffects {
    int num_groups = 0;
    Eigen::MatrixXd w;
};

// Computes each w(a, b) from pooled mid-ranks over the two cells.
PairwiseEffects pairwise_w(const StudyData& data);

}  // namespace clusterfx
