#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "clusterfx/effects.hpp"

namespace clusterfx {

// Cluster-level ECDF averages: for every cluster piece (one cluster within
// one cell) the mean of F_hat of each reference cell over that piece's
// observations, kept separately for complete and incomplete clusters.
// Also carries the counts and pairwise effects needed by the variance
// component estimators downstream.
struct ClusterSummaries {
    struct Complete {
        std::array<int, 2> m{};                      // observations per period
        std::array<std::vector<double>, 2> ybar{};   // [period][reference cell]
    };
    struct Incomplete {
        int m = 0;
        std::vector<double> ybar;                    // [reference cell]
    };

    int num_groups = 0;
    long long n_total = 0;
    Eigen::MatrixXd w_hat;                                          // centering constants
    std::vector<long long> cell_n;                                  // [cell]
    std::vector<std::vector<Complete>> complete;                    // [group][k]
    std::vector<std::array<std::vector<Incomplete>, 2>> incomplete; // [group][period][k]
};

ClusterSummaries cluster_summaries(const StudyData& data);
ClusterSummaries cluster_summaries(const StudyData& data, const PairwiseEffects& w);

// Variance component of the complete clusters of group r between periods s
// and l, referencing cells a and b. Empty when fewer than two complete
// clusters make the component inestimable (callers substitute zero).
// All indices 0-based; a, b are cell indices.
std::optional<double> tau_hat(const ClusterSummaries& s, int r, int s_period, int l_period,
                              int a, int b);

// Same for the incomplete clusters of cell (r,s); components across distinct
// periods vanish by cluster independence and are not parameterized here.
std::optional<double> eta_hat(const ClusterSummaries& s, int r, int s_period, int a, int b);

// The eight potentially nonzero variance components of one covariance entry,
// in assembly order with signs (+, -, -, +, +, -, -, +). Each component is
// exactly zero unless its two data groups coincide, and the whole entry is
// zero when either coordinate is degenerate (a == cell_jl or b == cell_rs).
std::array<double, 8> sigma_terms(const ClusterSummaries& s, int cell_jl, int cell_rs, int a,
                                  int b);

struct SigmaEstimate {
    Eigen::MatrixXd sigma;  // (2T)^2 x (2T)^2, entry (jl*2T+a, rs*2T+b)
    std::vector<std::string> warnings;
};

// Assembles every covariance entry from the case rules above with tau/eta
// plugged in; inestimable components contribute zero and are reported once
// per group or cell in the warnings.
SigmaEstimate assemble_sigma(const ClusterSummaries& s);

// Aggregates the blocked covariance into the 2T x 2T matrix estimating
// Cov(sqrt(N) (p_hat - p)): entry (jl, rs) is N (2T)^-2 times the sum of the
// corresponding block.
Eigen::MatrixXd v_hat(const Eigen::MatrixXd& sigma, long long n_total, int num_groups);

// Projects a symmetric matrix to the PSD cone when its smallest eigenvalue
// falls below -rel_tol * trace; otherwise returns the input unchanged.
Eigen::MatrixXd floor_psd(const Eigen::MatrixXd& sym, double rel_tol, bool* changed = nullptr);

struct CovEstimate {
    Eigen::MatrixXd sigma;   // blocked covariance of the influence vector
    Eigen::MatrixXd v;       // V_hat after PSD flooring (usually == v_raw)
    Eigen::MatrixXd v_raw;
    bool floored = false;
    std::vector<std::string> warnings;
};

CovEstimate estimate_covariance(const StudyData& data);
CovEstimate estimate_covariance(const StudyData& data, const PairwiseEffects& w);

}  // namespace clusterfx
