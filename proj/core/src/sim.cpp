#include "clusterfx/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <thread>

#include "clusterfx/covariance.hpp"
#include "clusterfx/inference.hpp"
#include "json_writer.hpp"

namespace clusterfx {

double Rng::normal() { return normal_quantile(uniform_open()); }

const char* family_name(Family f) {
    switch (f) {
        case Family::DiscretizedNormal: return "discretized_normal";
        case Family::LogNormal: return "log_normal";
        case Family::Cauchy: return "cauchy";
    }
    return "?";
}

const char* alternative_name(Alternative a) {
    switch (a) {
        case Alternative::Null: return "null";
        case Alternative::OnePoint: return "one_point";
        case Alternative::OneTime: return "one_time";
        case Alternative::IncreasingTrend: return "increasing_trend";
    }
    return "?";
}

int gen_cluster_sizes(int max_cluster_size, Rng& rng) {
    int size = 1;
    for (int i = 0; i < max_cluster_size - 1; ++i)
        if (rng.uniform() < 0.3) ++size;
    return size;
}

Eigen::MatrixXd block_cov(int m_pre, int m_post, const std::array<double, 3>& rho,
                          const std::array<double, 2>& sigma2) {
    if (m_pre < 0 || m_post < 0) throw DimensionError("cluster sizes must be nonnegative");
    const int n = m_pre + m_post;
    Eigen::MatrixXd cov(n, n);
    const double s1 = std::sqrt(sigma2[0]);
    const double s2 = std::sqrt(sigma2[1]);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const bool i_pre = i < m_pre;
            const bool j_pre = j < m_pre;
            if (i_pre && j_pre) {
                cov(i, j) = i == j ? sigma2[0] : rho[0] * sigma2[0];
            } else if (!i_pre && !j_pre) {
                cov(i, j) = i == j ? sigma2[1] : rho[1] * sigma2[1];
            } else {
                cov(i, j) = rho[2] * s1 * s2;
            }
        }
    }
    if (n > 0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov, Eigen::EigenvaluesOnly);
        const double floor = -1e-9 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
        if (es.eigenvalues().minCoeff() < floor) {
            throw NotPsdError("covariance for cluster sizes (" + std::to_string(m_pre) + "," +
                              std::to_string(m_post) + ") with rho=(" + std::to_string(rho[0]) +
                              "," + std::to_string(rho[1]) + "," + std::to_string(rho[2]) +
                              ") is not positive semidefinite");
        }
    }
    return cov;
}

namespace {

// Square-root factor of a PSD matrix with eigenvalue flooring at zero.
Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& cov) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    const double cut = 1e-12 * std::max(0.0, es.eigenvalues().cwiseAbs().maxCoeff());
    Eigen::VectorXd lam = es.eigenvalues();
    for (Eigen::Index i = 0; i < lam.size(); ++i) lam(i) = lam(i) > cut ? std::sqrt(lam(i)) : 0.0;
    return es.eigenvectors() * lam.asDiagonal();
}

std::pair<std::vector<double>, std::vector<double>> sample_with_factor(
    Family family, double mean_pre, double mean_post, const Eigen::MatrixXd& factor, int m_pre,
    int m_post, Rng& rng) {
    const int n = m_pre + m_post;
    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) z(i) = rng.normal();
    Eigen::VectorXd x = factor * z;

    double cauchy_scale = 1.0;
    if (family == Family::Cauchy) {
        // shared chi_1 mixing variable turns the joint normal into a
        // multivariate t with one degree of freedom
        const double w = std::abs(rng.normal());
        cauchy_scale = 1.0 / std::max(w, 1e-300);
    }

    std::pair<std::vector<double>, std::vector<double>> out;
    out.first.resize(static_cast<std::size_t>(m_pre));
    out.second.resize(static_cast<std::size_t>(m_post));
    for (int i = 0; i < n; ++i) {
        const double mu = i < m_pre ? mean_pre : mean_post;
        double v = 0.0;
        switch (family) {
            case Family::DiscretizedNormal: v = std::round(mu + x(i)); break;
            case Family::LogNormal: v = std::exp(x(i)) + mu; break;
            case Family::Cauchy: v = mu + x(i) * cauchy_scale; break;
        }
        if (i < m_pre) out.first[static_cast<std::size_t>(i)] = v;
        else out.second[static_cast<std::size_t>(i - m_pre)] = v;
    }
    return out;
}

}  // namespace

std::pair<std::vector<double>, std::vector<double>> gen_cluster(Family family, double mean_pre,
                                                                double mean_post,
                                                                const Eigen::MatrixXd& cov,
                                                                int m_pre, Rng& rng) {
    if (m_pre < 0 || m_pre > cov.rows()) throw DimensionError("m_pre outside covariance size");
    return sample_with_factor(family, mean_pre, mean_post, psd_factor(cov), m_pre,
                              static_cast<int>(cov.rows()) - m_pre, rng);
}

Eigen::MatrixXd apply_alternative(Alternative kind, double delta, int num_groups) {
    Eigen::MatrixXd mu = Eigen::MatrixXd::Zero(num_groups, 2);
    switch (kind) {
        case Alternative::Null: break;
        case Alternative::OnePoint: mu(num_groups - 1, 1) = delta; break;
        case Alternative::OneTime:
            for (int j = 0; j < num_groups; ++j) mu(j, 1) = delta;
            break;
        case Alternative::IncreasingTrend:
            for (int j = 0; j < num_groups; ++j)
                for (int l = 0; l < 2; ++l)
                    mu(j, l) = delta * static_cast<double>(2 * j + l + 1) /
                               static_cast<double>(2 * num_groups);
            break;
    }
    return mu;
}

StudyData gen_study(const SimulationConfig& config, Rng& rng) {
    const Eigen::MatrixXd mu = apply_alternative(config.alternative, config.delta,
                                                 config.num_groups);
    // factor cache over the achievable size pairs
    const int m_max = config.max_cluster_size;
    std::vector<Eigen::MatrixXd> factors(static_cast<std::size_t>((m_max + 1) * (m_max + 1)));
    auto factor_for = [&](int m1, int m2) -> const Eigen::MatrixXd& {
        Eigen::MatrixXd& f = factors[static_cast<std::size_t>(m1 * (m_max + 1) + m2)];
        if (f.size() == 0) f = psd_factor(block_cov(m1, m2, config.rho, config.sigma2));
        return f;
    };

    std::vector<ClusterRecord> records;
    records.reserve(static_cast<std::size_t>(
        config.num_groups * (config.n_complete + config.n_pre + config.n_post)));
    for (int j = 0; j < config.num_groups; ++j) {
        auto draw = [&](int count, const char* tag, int keep) {
            for (int k = 0; k < count; ++k) {
                const int m1 = gen_cluster_sizes(m_max, rng);
                const int m2 = gen_cluster_sizes(m_max, rng);
                auto [pre, post] = sample_with_factor(config.family, mu(j, 0), mu(j, 1),
                                                      factor_for(m1, m2), m1, m2, rng);
                ClusterRecord rec;
                rec.group = j + 1;
                rec.id = "g" + std::to_string(j + 1) + tag + std::to_string(k + 1);
                if (keep != 1) rec.pre = std::move(pre);
                if (keep != 0) rec.post = std::move(post);
                records.push_back(std::move(rec));
            }
        };
        draw(config.n_complete, "c", 2);  // keep both periods
        draw(config.n_pre, "p", 0);       // keep pre only
        draw(config.n_post, "q", 1);      // keep post only
    }
    return StudyData::from_clusters(config.num_groups, std::move(records));
}

void SimulationConfig::validate_or_throw() const {
    if (num_groups < 2) throw BadConfigError("T", "at least 2 intervention groups required");
    if (max_cluster_size != 3 && max_cluster_size != 6)
        throw BadConfigError("M", "max cluster size must be 3 or 6");
    if (n_complete < 0 || n_pre < 0 || n_post < 0)
        throw BadConfigError("n_c", "cluster allocations must be nonnegative");
    if (n_complete + n_pre < 1 || n_complete + n_post < 1)
        throw BadConfigError("n_c", "every cell needs at least one cluster");
    if (runs < 1) throw BadConfigError("runs", "run size must be at least 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw BadConfigError("alpha", "level must be in (0,1)");
    if (delta < 0.0) throw BadConfigError("delta", "shift must be nonnegative");
    if (!(sigma2[0] > 0.0 && sigma2[1] > 0.0))
        throw BadConfigError("sigma2", "variances must be positive");
    for (double r : rho)
        if (!(r >= -1.0 && r <= 1.0)) throw BadConfigError("rho", "correlations must be in [-1,1]");
    // feasibility across every achievable size pair; throws NotPsdError
    for (int m1 = 1; m1 <= max_cluster_size; ++m1)
        for (int m2 = 1; m2 <= max_cluster_size; ++m2) block_cov(m1, m2, rho, sigma2);
}

namespace {

struct RepOutcome {
    bool reject[3] = {false, false, false};
    bool degenerate = false;
    std::vector<std::string> warnings;
};

RepOutcome run_one(const SimulationConfig& config, const std::array<ContrastSpec, 3>& contrasts,
                   std::uint64_t rep) {
    Rng rng = Rng::substream(config.seed, rep);
    const StudyData data = gen_study(config, rng);
    const PairwiseEffects w = pairwise_w(data);
    const EffectEstimate est = estimate_p(data, w);
    const CovEstimate cov = estimate_covariance(data, w);
    RepOutcome out;
    out.warnings = cov.warnings;
    for (int i = 0; i < 3; ++i) {
        try {
            const HypothesisTest t = anova_type_test(est, cov.v, contrasts[static_cast<std::size_t>(i)],
                                                     config.alpha);
            out.reject[i] = t.p_value < config.alpha;
        } catch (const DegenerateVarianceError&) {
            out.degenerate = true;  // no evidence against the null
        }
    }
    return out;
}

}  // namespace

SimulationReport run_experiment(const SimulationConfig& config, int threads) {
    config.validate_or_throw();
    const std::array<ContrastSpec, 3> contrasts = {
        build_contrast(ContrastKind::Intervention, config.num_groups),
        build_contrast(ContrastKind::Time, config.num_groups),
        build_contrast(ContrastKind::Interaction, config.num_groups)};

    const int runs = config.runs;
    std::vector<RepOutcome> outcomes(static_cast<std::size_t>(runs));

    int n_threads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    n_threads = std::clamp(n_threads, 1, runs);

    if (n_threads == 1) {
        for (int rep = 0; rep < runs; ++rep)
            outcomes[static_cast<std::size_t>(rep)] =
                run_one(config, contrasts, static_cast<std::uint64_t>(rep));
    } else {
        std::atomic<int> next{0};
        auto worker = [&]() {
            for (;;) {
                const int rep = next.fetch_add(1);
                if (rep >= runs) return;
                outcomes[static_cast<std::size_t>(rep)] =
                    run_one(config, contrasts, static_cast<std::uint64_t>(rep));
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    SimulationReport report;
    report.runs = runs;
    long long counts[3] = {0, 0, 0};
    std::map<std::string, long long> warn;
    for (const RepOutcome& o : outcomes) {
        for (int i = 0; i < 3; ++i) counts[i] += o.reject[i] ? 1 : 0;
        report.degenerate_reps += o.degenerate ? 1 : 0;
        for (const std::string& w : o.warnings) ++warn[w];
    }
    const char* names[3] = {"intervention", "time", "interaction"};
    for (int i = 0; i < 3; ++i) {
        const double rate = static_cast<double>(counts[i]) / static_cast<double>(runs);
        report.effects[static_cast<std::size_t>(i)].effect = names[i];
        report.effects[static_cast<std::size_t>(i)].rate_pct = 100.0 * rate;
        report.effects[static_cast<std::size_t>(i)].mc_se_pct =
            100.0 * std::sqrt(rate * (1.0 - rate) / static_cast<double>(runs));
    }
    report.warning_counts.assign(warn.begin(), warn.end());
    return report;
}

std::string report_csv(const SimulationReport& report) {
    std::string out = "effect,rate,mc_se,runs\n";
    char buf[128];
    for (const auto& row : report.effects) {
        std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%d\n", row.effect.c_str(), row.rate_pct,
                      row.mc_se_pct, report.runs);
        out += buf;
    }
    return out;
}

std::string report_json(const SimulationReport& report, const SimulationConfig& config) {
    detail::JsonWriter w;
    w.begin_object();
    w.key("config");
    w.begin_object();
    w.kv("family", family_name(config.family));
    w.kv("T", config.num_groups);
    w.kv("n_c", config.n_complete);
    w.kv("n_1", config.n_pre);
    w.kv("n_2", config.n_post);
    w.kv("M", config.max_cluster_size);
    w.key("rho");
    w.begin_array();
    for (double r : config.rho) w.value(r);
    w.end_array();
    w.key("sigma2");
    w.begin_array();
    for (double s : config.sigma2) w.value(s);
    w.end_array();
    w.kv("alternative", alternative_name(config.alternative));
    w.kv("delta", config.delta);
    w.kv("runs", config.runs);
    w.kv("alpha", config.alpha);
    w.kv("seed", static_cast<long long>(config.seed));
    w.end_object();
    w.key("effects");
    w.begin_array();
    for (const auto& row : report.effects) {
        w.begin_object();
        w.kv("effect", row.effect);
        w.kv("rate", row.rate_pct);
        w.kv("mc_se", row.mc_se_pct);
        w.kv("runs", report.runs);
        w.end_object();
    }
    w.end_array();
    w.kv("degenerate_reps", report.degenerate_reps);
    w.key("warnings");
    w.begin_array();
    for (const auto& [msg, count] : report.warning_counts) {
        w.begin_object();
        w.kv("message", msg);
        w.kv("count", count);
        w.end_object();
    }
    w.end_array();
    w.end_object();
    return w.str();
}

}  // namespace clusterfx
