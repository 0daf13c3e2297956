#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "clusterfx/effects.hpp"

namespace clusterfx {

// a-dimensional centering matrix I - J/a: symmetric, idempotent, zero row sums.
Eigen::MatrixXd centering(int a);

enum class ContrastKind { Intervention, Time, Interaction, Custom };

// An hypothesis expressed through its unique orthogonal projection onto the
// row space of a contrast matrix.
struct ContrastSpec {
    ContrastKind kind = ContrastKind::Custom;
    std::string label;
    Eigen::MatrixXd projection;  // 2T x 2T, symmetric idempotent
};

// The three standard hypotheses of the T x 2 design, built as Kronecker
// products of centering and averaging matrices. Intervention and Interaction
// require at least two groups.
ContrastSpec build_contrast(ContrastKind kind, int num_groups);

// Projection for an arbitrary contrast matrix C (rows are contrasts over the
// 2T cells): C' (C C')^+ C.
ContrastSpec custom_contrast(const Eigen::MatrixXd& c_rows, int num_groups,
                             const std::string& label = "custom");

// Moore-Penrose pseudoinverse. Symmetric inputs go through an eigendecomposition,
// others through the SVD; singular values below tol * max are treated as zero.
// A negative tol selects the default 1e-12 * max singular value.
Eigen::MatrixXd pinv(const Eigen::MatrixXd& m, double tol = -1.0);

// Upper tail of the chi-square distribution with (possibly fractional) f > 0
// degrees of freedom, i.e. the regularized upper incomplete gamma Q(f/2, x/2).
double chi2_tail(double x, double f);

// Quantile of the standard normal distribution, p in (0,1).
double normal_quantile(double p);

struct HypothesisTest {
    std::string effect;
    double statistic = 0.0;  // quadratic form, scaled to expectation 1 under the null
    double f_hat = 0.0;      // estimated degrees of freedom of the approximation
    double p_value = 1.0;
    double alpha = 0.05;
    bool reject_at(double a) const { return p_value < a; }
    bool rejected() const { return p_value < alpha; }
};

// Quadratic-form test of T p = 0 with a two-moment chi-square approximation:
// statistic N p'Tp / tr(TV), approximated by chi2_f/f with
// f = tr(TV)^2 / tr(TVTV). Throws DegenerateVarianceError when the estimated
// variability in the hypothesis space vanishes.
HypothesisTest anova_type_test(const EffectEstimate& est, const Eigen::MatrixXd& v_hat,
                               const ContrastSpec& spec, double alpha = 0.05);

// Wald-type statistic N p'C'(CVC')^+Cp with chi-square rank(CVC') reference.
// Known to be liberal in small samples; the flag on the result records that.
struct WaldTest {
    double statistic = 0.0;
    int df = 0;
    double p_value = 1.0;
    bool liberal_in_small_samples = true;
};
WaldTest wald_type_test(const EffectEstimate& est, const Eigen::MatrixXd& v_hat,
                        const Eigen::MatrixXd& c_rows);

enum class CiTransform { Identity, Logit };

struct CellInterval {
    int group = 0;   // 1-based
    int period = 0;  // 1-based
    double estimate = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double variance = 0.0;  // diagonal entry of V_hat
    bool boundary = false;  // estimate on {0,1} under the logit transform
};

struct EffectCI {
    CiTransform transform = CiTransform::Logit;
    double alpha = 0.05;
    std::vector<CellInterval> cells;
};

// Per-cell asymptotic confidence intervals. The logit transform keeps the
// interval inside (0,1); estimates exactly on the boundary get a degenerate
// interval and a per-cell flag, other cells are unaffected.
EffectCI effect_ci(const EffectEstimate& est, const Eigen::MatrixXd& v_hat, double alpha,
                   CiTransform transform);

}  // namespace clusterfx
