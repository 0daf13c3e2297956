#include "clusterfx/analysis.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "json_writer.hpp"

namespace clusterfx {

AnalysisReport analyze(const StudyData& data, const AnalysisOptions& options) {
    AnalysisReport report;
    report.num_groups = data.num_groups();
    report.n_total = data.total_count();
    report.alpha = options.alpha;
    report.transform = options.transform;
    for (int j = 0; j < data.num_groups(); ++j) {
        report.n_complete += data.complete_clusters(j);
        report.n_incomplete_pre += data.incomplete_clusters(j, 0);
        report.n_incomplete_post += data.incomplete_clusters(j, 1);
    }
    report.n_clusters = report.n_complete + report.n_incomplete_pre + report.n_incomplete_post;

    report.warnings = validate(data);

    const PairwiseEffects w = pairwise_w(data);
    const EffectEstimate est = estimate_p(data, w);
    const CovEstimate cov = estimate_covariance(data, w);
    for (const std::string& msg : cov.warnings) {
        if (std::find(report.warnings.begin(), report.warnings.end(), msg) ==
            report.warnings.end()) {
            report.warnings.push_back(msg);
        }
    }

    report.intervals = effect_ci(est, cov.v, options.alpha, options.transform);
    report.decomposition = decompose(est.p, data.num_groups());

    std::vector<ContrastKind> kinds;
    if (data.num_groups() >= 2) kinds = {ContrastKind::Intervention, ContrastKind::Time,
                                         ContrastKind::Interaction};
    else kinds = {ContrastKind::Time};
    for (ContrastKind kind : kinds) {
        report.tests.push_back(
            anova_type_test(est, cov.v, build_contrast(kind, data.num_groups()), options.alpha));
    }

    for (int j = 0; j < data.num_groups(); ++j) {
        Eigen::MatrixXd c = Eigen::MatrixXd::Zero(1, 2 * data.num_groups());
        c(0, 2 * j) = 1.0;
        c(0, 2 * j + 1) = -1.0;
        AnalysisReport::PrePost row;
        row.group = j + 1;
        row.pre = est.p(2 * j);
        row.post = est.p(2 * j + 1);
        row.diff = row.pre - row.post;
        const ContrastSpec spec =
            custom_contrast(c, data.num_groups(), "prepost_group" + std::to_string(j + 1));
        row.p_value = anova_type_test(est, cov.v, spec, options.alpha).p_value;
        report.group_prepost.push_back(row);
    }
    return report;
}

std::string to_json(const AnalysisReport& r) {
    detail::JsonWriter w;
    w.begin_object();
    w.kv("groups", r.num_groups);
    w.kv("observations", r.n_total);
    w.key("clusters");
    w.begin_object();
    w.kv("total", r.n_clusters);
    w.kv("complete", r.n_complete);
    w.kv("pre_only", r.n_incomplete_pre);
    w.kv("post_only", r.n_incomplete_post);
    w.end_object();
    w.kv("alpha", r.alpha);
    w.kv("transform", r.transform == CiTransform::Logit ? "logit" : "identity");

    w.key("cells");
    w.begin_array();
    for (const CellInterval& c : r.intervals.cells) {
        w.begin_object();
        w.kv("group", c.group);
        w.kv("period", c.period == 1 ? "pre" : "post");
        w.kv("estimate", c.estimate);
        w.kv("lower", c.lower);
        w.kv("upper", c.upper);
        w.kv("variance", c.variance);
        w.kv("boundary", c.boundary);
        w.end_object();
    }
    w.end_array();

    w.key("decomposition");
    w.begin_object();
    w.key("intervention");
    w.begin_array();
    for (Eigen::Index i = 0; i < r.decomposition.alpha.size(); ++i)
        w.value(r.decomposition.alpha(i));
    w.end_array();
    w.key("time");
    w.begin_array();
    for (Eigen::Index i = 0; i < 2; ++i) w.value(r.decomposition.beta(i));
    w.end_array();
    w.key("interaction");
    w.begin_array();
    for (Eigen::Index j = 0; j < r.decomposition.alphabeta.rows(); ++j) {
        w.begin_array();
        for (Eigen::Index l = 0; l < 2; ++l) w.value(r.decomposition.alphabeta(j, l));
        w.end_array();
    }
    w.end_array();
    w.end_object();

    w.key("tests");
    w.begin_array();
    for (const HypothesisTest& t : r.tests) {
        w.begin_object();
        w.kv("effect", t.effect);
        w.kv("statistic", t.statistic);
        w.kv("df", t.f_hat);
        w.kv("p_value", t.p_value);
        w.end_object();
    }
    w.end_array();

    w.key("prepost");
    w.begin_array();
    for (const auto& row : r.group_prepost) {
        w.begin_object();
        w.kv("group", row.group);
        w.kv("pre", row.pre);
        w.kv("post", row.post);
        w.kv("diff", row.diff);
        w.kv("p_value", row.p_value);
        w.end_object();
    }
    w.end_array();

    w.key("warnings");
    w.begin_array();
    for (const std::string& msg : r.warnings) w.value(msg);
    w.end_array();
    w.end_object();
    return w.str();
}

std::string to_text(const AnalysisReport& r) {
    std::ostringstream out;
    char buf[256];
    out << "Rank-based relative effect analysis\n";
    out << "-----------------------------------\n";
    std::snprintf(buf, sizeof(buf),
                  "groups: %d   observations: %lld   clusters: %lld "
                  "(complete %lld, pre-only %lld, post-only %lld)\n\n",
                  r.num_groups, r.n_total, r.n_clusters, r.n_complete, r.n_incomplete_pre,
                  r.n_incomplete_post);
    out << buf;

    std::snprintf(buf, sizeof(buf), "Relative effects with %g%% confidence intervals (%s):\n",
                  100.0 * (1.0 - r.alpha),
                  r.transform == CiTransform::Logit ? "logit" : "identity");
    out << buf;
    out << "  group  period  estimate     lower     upper\n";
    for (const CellInterval& c : r.intervals.cells) {
        std::snprintf(buf, sizeof(buf), "  %5d  %-6s  %8.4f  %8.4f  %8.4f%s\n", c.group,
                      c.period == 1 ? "pre" : "post", c.estimate, c.lower, c.upper,
                      c.boundary ? "  [boundary]" : "");
        out << buf;
    }

    out << "\nEffect decomposition:\n  intervention:";
    for (Eigen::Index i = 0; i < r.decomposition.alpha.size(); ++i) {
        std::snprintf(buf, sizeof(buf), " %8.4f", r.decomposition.alpha(i));
        out << buf;
    }
    out << "\n  time:        ";
    for (int i = 0; i < 2; ++i) {
        std::snprintf(buf, sizeof(buf), " %8.4f", r.decomposition.beta(i));
        out << buf;
    }
    out << "\n  interaction: ";
    for (Eigen::Index j = 0; j < r.decomposition.alphabeta.rows(); ++j) {
        std::snprintf(buf, sizeof(buf), " (%7.4f, %7.4f)", r.decomposition.alphabeta(j, 0),
                      r.decomposition.alphabeta(j, 1));
        out << buf;
    }
    out << "\n";

    out << "\nHypothesis tests (quadratic form, chi-square approximation):\n";
    out << "  effect        statistic        df   p-value\n";
    for (const HypothesisTest& t : r.tests) {
        std::snprintf(buf, sizeof(buf), "  %-12s  %9.4f  %8.3f  %8.4f%s\n", t.effect.c_str(),
                      t.statistic, t.f_hat, t.p_value, t.rejected() ? "  *" : "");
        out << buf;
    }

    out << "\nPre-post effects by group:\n";
    out << "  group       pre      post      diff   p-value\n";
    for (const auto& row : r.group_prepost) {
        std::snprintf(buf, sizeof(buf), "  %5d  %8.4f  %8.4f  %8.4f  %8.4f\n", row.group, row.pre,
                      row.post, row.diff, row.p_value);
        out << buf;
    }

    if (!r.warnings.empty()) {
        out << "\nWarnings:\n";
        for (const std::string& msg : r.warnings) out << "  - " << msg << "\n";
    }
    return out.str();
}

}  // namespace clusterfx
