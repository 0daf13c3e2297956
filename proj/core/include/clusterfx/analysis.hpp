#pragma once

#include <string>
#include <vector>

#include "clusterfx/covariance.hpp"
#include "clusterfx/inference.hpp"

namespace clusterfx {

struct AnalysisOptions {
    double alpha = 0.05;
    CiTransform transform = CiTransform::Logit;
};

// Full pipeline result: effects with confidence intervals, the additive
// decomposition, the three factorial hypothesis tests and the per-group
// pre-post contrasts.
struct AnalysisReport {
    int num_groups = 0;
    long long n_total = 0;
    long long n_clusters = 0;
    long long n_complete = 0;
    long long n_incomplete_pre = 0;
    long long n_incomplete_post = 0;
    double alpha = 0.05;
    CiTransform transform = CiTransform::Logit;

    EffectCI intervals;
    EffectDecomposition decomposition;
    std::vector<HypothesisTest> tests;  // intervention/time/interaction (as applicable)

    struct PrePost {
        int group = 0;  // 1-based
        double pre = 0.0;
        double post = 0.0;
        double diff = 0.0;  // pre - post
        double p_value = 1.0;
    };
    std::vector<PrePost> group_prepost;

    std::vector<std::string> warnings;
};

AnalysisReport analyze(const StudyData& data, const AnalysisOptions& options = {});

// Machine-readable rendering; numbers carry 17 significant digits.
std::string to_json(const AnalysisReport& report);

// Table layout for terminals.
std::string to_text(const AnalysisReport& report);

}  // namespace clusterfx
