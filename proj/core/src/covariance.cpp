#include "clusterfx/covariance.hpp"

#include <cmath>

namespace clusterfx {

namespace {

std::vector<double> ecdf_means(const StudyData& data, const std::vector<double>& obs) {
    const int cells = data.num_cells();
    std::vector<double> ybar(static_cast<std::size_t>(cells), 0.0);
    for (int c = 0; c < cells; ++c) {
        const std::vector<double>& ref = data.sorted_cell(c / 2, c % 2);
        double sum = 0.0;
        for (double x : obs) sum += ecdf_sorted(ref, x);
        ybar[static_cast<std::size_t>(c)] = sum / static_cast<double>(obs.size());
    }
    return ybar;
}

std::string tau_warning(int group) {
    return "tau not estimable for group " + std::to_string(group + 1) +
           " (fewer than 2 complete clusters); contribution set to zero";
}

std::string eta_warning(int group, int period) {
    return "eta(" + std::to_string(group + 1) + "," + std::to_string(period + 1) +
           ") contribution set to zero (fewer than 2 incomplete clusters)";
}

}  // namespace

ClusterSummaries cluster_summaries(const StudyData& data, const PairwiseEffects& w) {
    ClusterSummaries s;
    s.num_groups = data.num_groups();
    s.n_total = data.total_count();
    s.w_hat = w.w;
    const int cells = data.num_cells();
    s.cell_n.resize(static_cast<std::size_t>(cells));
    for (int c = 0; c < cells; ++c) s.cell_n[static_cast<std::size_t>(c)] = data.cell_count(c / 2, c % 2);

    s.complete.resize(static_cast<std::size_t>(s.num_groups));
    s.incomplete.resize(static_cast<std::size_t>(s.num_groups));
    for (int j = 0; j < s.num_groups; ++j) {
        for (int idx : data.complete_index(j)) {
            const ClusterRecord& c = data.clusters()[static_cast<std::size_t>(idx)];
            ClusterSummaries::Complete cs;
            for (int l = 0; l < 2; ++l) {
                cs.m[static_cast<std::size_t>(l)] = static_cast<int>(c.period(l).size());
                cs.ybar[static_cast<std::size_t>(l)] = ecdf_means(data, c.period(l));
            }
            s.complete[static_cast<std::size_t>(j)].push_back(std::move(cs));
        }
        for (int l = 0; l < 2; ++l) {
            for (int idx : data.incomplete_index(j, l)) {
                const ClusterRecord& c = data.clusters()[static_cast<std::size_t>(idx)];
                ClusterSummaries::Incomplete is;
                is.m = static_cast<int>(c.period(l).size());
                is.ybar = ecdf_means(data, c.period(l));
                s.incomplete[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)].push_back(
                    std::move(is));
            }
        }
    }
    return s;
}

ClusterSummaries cluster_summaries(const StudyData& data) {
    return cluster_summaries(data, pairwise_w(data));
}

std::optional<double> tau_hat(const ClusterSummaries& s, int r, int s_period, int l_period, int a,
                              int b) {
    const auto& group = s.complete[static_cast<std::size_t>(r)];
    const int n_c = static_cast<int>(group.size());
    if (n_c <= 1) return std::nullopt;
    const int cell_rs = 2 * r + s_period;
    const int cell_rl = 2 * r + l_period;
    const double w_a = s.w_hat(a, cell_rs);  // mean of F_a over cell (r,s)
    const double w_b = s.w_hat(b, cell_rl);
    double sum = 0.0;
    for (const auto& k : group) {
        const double ms = static_cast<double>(k.m[static_cast<std::size_t>(s_period)]);
        const double ml = static_cast<double>(k.m[static_cast<std::size_t>(l_period)]);
        const double da = k.ybar[static_cast<std::size_t>(s_period)][static_cast<std::size_t>(a)] - w_a;
        const double db = k.ybar[static_cast<std::size_t>(l_period)][static_cast<std::size_t>(b)] - w_b;
        sum += ms * ml * da * db;
    }
    const double n_rs = static_cast<double>(s.cell_n[static_cast<std::size_t>(cell_rs)]);
    const double n_rl = static_cast<double>(s.cell_n[static_cast<std::size_t>(cell_rl)]);
    return static_cast<double>(n_c) / (n_rs * n_rl * static_cast<double>(n_c - 1)) * sum;
}

std::optional<double> eta_hat(const ClusterSummaries& s, int r, int s_period, int a, int b) {
    const auto& pieces =
        s.incomplete[static_cast<std::size_t>(r)][static_cast<std::size_t>(s_period)];
    const int n_rs = static_cast<int>(pieces.size());
    if (n_rs <= 1) return std::nullopt;
    const int cell_rs = 2 * r + s_period;
    const double w_a = s.w_hat(a, cell_rs);
    const double w_b = s.w_hat(b, cell_rs);
    double sum = 0.0;
    for (const auto& k : pieces) {
        const double m = static_cast<double>(k.m);
        sum += m * m * (k.ybar[static_cast<std::size_t>(a)] - w_a) *
               (k.ybar[static_cast<std::size_t>(b)] - w_b);
    }
    const double n_obs = static_cast<double>(s.cell_n[static_cast<std::size_t>(cell_rs)]);
    return static_cast<double>(n_rs) / (n_obs * n_obs * static_cast<double>(n_rs - 1)) * sum;
}

std::array<double, 8> sigma_terms(const ClusterSummaries& s, int cell_jl, int cell_rs, int a,
                                  int b) {
    std::array<double, 8> t{};
    // degenerate coordinates: the influence entry for a cell against itself
    // is identically zero
    if (a == cell_jl || b == cell_rs) return t;
    const int j = cell_jl / 2, l = cell_jl % 2;
    const int r = cell_rs / 2, sp = cell_rs % 2;
    const int p = a / 2, q = a % 2;
    const int p2 = b / 2, q2 = b % 2;

    if (p == p2) t[0] = tau_hat(s, p, q, q2, cell_jl, cell_rs).value_or(0.0);
    if (p == r) t[1] = tau_hat(s, p, q, sp, cell_jl, b).value_or(0.0);
    if (j == p2) t[2] = tau_hat(s, j, l, q2, a, cell_rs).value_or(0.0);
    if (j == r) t[3] = tau_hat(s, j, l, sp, a, b).value_or(0.0);
    if (a == b) t[4] = eta_hat(s, p, q, cell_jl, cell_rs).value_or(0.0);
    if (a == cell_rs) t[5] = eta_hat(s, p, q, cell_jl, b).value_or(0.0);
    if (b == cell_jl) t[6] = eta_hat(s, j, l, a, cell_rs).value_or(0.0);
    if (cell_jl == cell_rs) t[7] = eta_hat(s, j, l, a, b).value_or(0.0);
    return t;
}

SigmaEstimate assemble_sigma(const ClusterSummaries& s) {
    const int t_groups = s.num_groups;
    const int cells = 2 * t_groups;
    SigmaEstimate out;

    // Memoize the variance components; indices [group][period][period][a][b].
    const std::size_t c2 = static_cast<std::size_t>(cells) * static_cast<std::size_t>(cells);
    std::vector<double> tau(static_cast<std::size_t>(t_groups) * 4 * c2, 0.0);
    std::vector<double> eta(static_cast<std::size_t>(t_groups) * 2 * c2, 0.0);
    auto tau_at = [&](int r, int sp, int lp, int a, int b) -> double& {
        return tau[(((static_cast<std::size_t>(r) * 2 + static_cast<std::size_t>(sp)) * 2 +
                     static_cast<std::size_t>(lp)) *
                        static_cast<std::size_t>(cells) +
                    static_cast<std::size_t>(a)) *
                       static_cast<std::size_t>(cells) +
                   static_cast<std::size_t>(b)];
    };
    auto eta_at = [&](int r, int sp, int a, int b) -> double& {
        return eta[((static_cast<std::size_t>(r) * 2 + static_cast<std::size_t>(sp)) *
                        static_cast<std::size_t>(cells) +
                    static_cast<std::size_t>(a)) *
                       static_cast<std::size_t>(cells) +
                   static_cast<std::size_t>(b)];
    };

    for (int r = 0; r < t_groups; ++r) {
        if (s.complete[static_cast<std::size_t>(r)].size() >= 2) {
            for (int sp = 0; sp < 2; ++sp)
                for (int lp = 0; lp < 2; ++lp)
                    for (int a = 0; a < cells; ++a)
                        for (int b = 0; b < cells; ++b)
                            tau_at(r, sp, lp, a, b) = *tau_hat(s, r, sp, lp, a, b);
        } else {
            out.warnings.push_back(tau_warning(r));
        }
        for (int sp = 0; sp < 2; ++sp) {
            const std::size_t n_inc =
                s.incomplete[static_cast<std::size_t>(r)][static_cast<std::size_t>(sp)].size();
            if (n_inc <= 1) {
                out.warnings.push_back(eta_warning(r, sp));
                continue;
            }
            for (int a = 0; a < cells; ++a)
                for (int b = 0; b < cells; ++b) eta_at(r, sp, a, b) = *eta_hat(s, r, sp, a, b);
        }
    }

    const int dim = cells * cells;
    out.sigma.setZero(dim, dim);
    for (int cell_jl = 0; cell_jl < cells; ++cell_jl) {
        const int j = cell_jl / 2, l = cell_jl % 2;
        for (int cell_rs = 0; cell_rs < cells; ++cell_rs) {
            const int r = cell_rs / 2, sp = cell_rs % 2;
            for (int a = 0; a < cells; ++a) {
                if (a == cell_jl) continue;
                const int p = a / 2, q = a % 2;
                for (int b = 0; b < cells; ++b) {
                    if (b == cell_rs) continue;
                    const int p2 = b / 2, q2 = b % 2;
                    double v = 0.0;
                    if (p == p2) v += tau_at(p, q, q2, cell_jl, cell_rs);
                    if (p == r) v -= tau_at(p, q, sp, cell_jl, b);
                    if (j == p2) v -= tau_at(j, l, q2, a, cell_rs);
                    if (j == r) v += tau_at(j, l, sp, a, b);
                    if (a == b) v += eta_at(p, q, cell_jl, cell_rs);
                    if (a == cell_rs) v -= eta_at(p, q, cell_jl, b);
                    if (b == cell_jl) v -= eta_at(j, l, a, cell_rs);
                    if (cell_jl == cell_rs) v += eta_at(j, l, a, b);
                    out.sigma(cell_jl * cells + a, cell_rs * cells + b) = v;
                }
            }
        }
    }
    return out;
}

Eigen::MatrixXd v_hat(const Eigen::MatrixXd& sigma, long long n_total, int num_groups) {
    const int cells = 2 * num_groups;
    if (sigma.rows() != cells * cells || sigma.cols() != cells * cells) {
        throw DimensionError("sigma has wrong dimensions for " + std::to_string(num_groups) +
                             " groups");
    }
    const double scale = static_cast<double>(n_total) /
                         (static_cast<double>(cells) * static_cast<double>(cells));
    Eigen::MatrixXd v(cells, cells);
    for (int bi = 0; bi < cells; ++bi)
        for (int bj = 0; bj < cells; ++bj)
            v(bi, bj) = scale * sigma.block(bi * cells, bj * cells, cells, cells).sum();
    return v;
}

Eigen::MatrixXd floor_psd(const Eigen::MatrixXd& sym, double rel_tol, bool* changed) {
    if (changed) *changed = false;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double threshold = -rel_tol * std::max(sym.trace(), 0.0);
    if (ev.minCoeff() >= threshold) return sym;
    if (changed) *changed = true;
    Eigen::VectorXd floored = ev.cwiseMax(0.0);
    return es.eigenvectors() * floored.asDiagonal() * es.eigenvectors().transpose();
}

CovEstimate estimate_covariance(const StudyData& data, const PairwiseEffects& w) {
    CovEstimate est;
    ClusterSummaries s = cluster_summaries(data, w);
    SigmaEstimate se = assemble_sigma(s);
    est.sigma = std::move(se.sigma);
    est.warnings = std::move(se.warnings);
    est.v_raw = v_hat(est.sigma, data.total_count(), data.num_groups());
    est.v = floor_psd(est.v_raw, 1e-10, &est.floored);
    if (est.floored) {
        est.warnings.push_back(
            "estimated covariance matrix had eigenvalues below tolerance; floored to zero");
    }
    return est;
}

CovEstimate estimate_covariance(const StudyData& data) {
    return estimate_covariance(data, pairwise_w(data));
}

}  // namespace clusterfx
