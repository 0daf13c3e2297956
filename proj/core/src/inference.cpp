#include "clusterfx/inference.hpp"

#include <cmath>

#include "clusterfx/errors.hpp"

namespace clusterfx {

Eigen::MatrixXd centering(int a) {
    if (a < 1) throw DimensionError("centering matrix needs dimension >= 1");
    const double inv = 1.0 / static_cast<double>(a);
    return Eigen::MatrixXd::Identity(a, a) - Eigen::MatrixXd::Constant(a, a, inv);
}

namespace {

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

}  // namespace

ContrastSpec build_contrast(ContrastKind kind, int num_groups) {
    if (num_groups < 1) throw DimensionError("design needs at least one group");
    const Eigen::MatrixXd p2 = centering(2);
    const Eigen::MatrixXd j2_half = Eigen::MatrixXd::Constant(2, 2, 0.5);
    ContrastSpec spec;
    spec.kind = kind;
    switch (kind) {
        case ContrastKind::Intervention:
            if (num_groups < 2) throw DimensionError("intervention contrast needs >= 2 groups");
            spec.label = "intervention";
            spec.projection = kron(centering(num_groups), j2_half);
            break;
        case ContrastKind::Time:
            spec.label = "time";
            spec.projection = kron(Eigen::MatrixXd::Constant(num_groups, num_groups,
                                                             1.0 / num_groups),
                                   p2);
            break;
        case ContrastKind::Interaction:
            if (num_groups < 2) throw DimensionError("interaction contrast needs >= 2 groups");
            spec.label = "interaction";
            spec.projection = kron(centering(num_groups), p2);
            break;
        case ContrastKind::Custom:
            throw DimensionError("custom contrasts must supply a contrast matrix");
    }
    return spec;
}

ContrastSpec custom_contrast(const Eigen::MatrixXd& c_rows, int num_groups,
                             const std::string& label) {
    if (c_rows.cols() != 2 * num_groups) {
        throw DimensionError("contrast matrix has " + std::to_string(c_rows.cols()) +
                             " columns, expected " + std::to_string(2 * num_groups));
    }
    ContrastSpec spec;
    spec.kind = ContrastKind::Custom;
    spec.label = label;
    spec.projection = c_rows.transpose() * pinv(c_rows * c_rows.transpose()) * c_rows;
    return spec;
}

Eigen::MatrixXd pinv(const Eigen::MatrixXd& m, double tol) {
    const double scale = m.cwiseAbs().maxCoeff();
    if (m.rows() == m.cols() &&
        (m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + scale)) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
        const Eigen::VectorXd& ev = es.eigenvalues();
        const double max_abs = ev.cwiseAbs().maxCoeff();
        const double cutoff = (tol < 0 ? 1e-12 : tol) * max_abs;
        Eigen::VectorXd inv(ev.size());
        for (Eigen::Index i = 0; i < ev.size(); ++i)
            inv(i) = std::abs(ev(i)) > cutoff ? 1.0 / ev(i) : 0.0;
        return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double cutoff = (tol < 0 ? 1e-12 : tol) * (sv.size() ? sv.maxCoeff() : 0.0);
    Eigen::VectorXd inv(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i) inv(i) = sv(i) > cutoff ? 1.0 / sv(i) : 0.0;
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

namespace {

// Regularized lower incomplete gamma by power series, for x < a + 1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double del = 1.0 / a;
    double sum = del;
    for (int n = 0; n < 1000; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma by modified Lentz continued fraction,
// for x >= a + 1.
double gamma_q_cf(double a, double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 1000; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double chi2_tail(double x, double f) {
    if (!(f > 0.0)) throw DimensionError("chi-square tail needs positive degrees of freedom");
    if (!(x >= 0.0)) throw DimensionError("chi-square tail needs x >= 0");
    const double a = 0.5 * f;
    const double xx = 0.5 * x;
    if (xx == 0.0) return 1.0;
    if (xx < a + 1.0) return 1.0 - gamma_p_series(a, xx);
    return gamma_q_cf(a, xx);
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DimensionError("normal quantile needs p in (0,1)");
    // Wichura's rational approximations (double precision); relative error
    // well below 1e-8 across the domain.
    static const double a[8] = {3.3871328727963666080e0,  1.3314166789178437745e2,
                                1.9715909503065514427e3,  1.3731693765509461125e4,
                                4.5921953931549871457e4,  6.7265770927008700853e4,
                                3.3430575583588128105e4,  2.5090809287301226727e3};
    static const double b[8] = {1.0,
                                4.2313330701600911252e1,
                                6.8718700749205790830e2,
                                5.3941960214247511077e3,
                                2.1213794301586595867e4,
                                3.9307895800092710610e4,
                                2.8729085735721942674e4,
                                5.2264952788528545610e3};
    static const double c[8] = {1.42343711074968357734e0,  4.63033784615654529590e0,
                                5.76949722146069140550e0,  3.64784832476320460504e0,
                                1.27045825245236838258e0,  2.41780725177450611770e-1,
                                2.27238449892691845833e-2, 7.74545014278341407640e-4};
    static const double d[8] = {1.0,
                                2.05319162663775882187e0,
                                1.67638483018380384940e0,
                                6.89767334985100004550e-1,
                                1.48103976427480074590e-1,
                                1.51986665636164571966e-2,
                                5.47593808499534494600e-4,
                                1.05075007164441684324e-9};
    static const double e[8] = {6.65790464350110377720e0,  5.46378491116411436990e0,
                                1.78482653991729133580e0,  2.96560571828504891230e-1,
                                2.65321895265761230930e-2, 1.24266094738807843860e-3,
                                2.71155556874348757815e-5, 2.01033439929228813265e-7};
    static const double f[8] = {1.0,
                                5.99832206555887937690e-1,
                                1.36929880922735805310e-1,
                                1.48753612908506148525e-2,
                                7.86869131145613259100e-4,
                                1.84631831751005468180e-5,
                                1.42151175831644588870e-7,
                                2.04426310338993978564e-15};
    auto poly = [](const double* k, double r) {
        return ((((((k[7] * r + k[6]) * r + k[5]) * r + k[4]) * r + k[3]) * r + k[2]) * r + k[1]) *
                   r +
               k[0];
    };
    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q * poly(a, r) / poly(b, r);
    }
    double r = q < 0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double z;
    if (r <= 5.0) {
        r -= 1.6;
        z = poly(c, r) / poly(d, r);
    } else {
        r -= 5.0;
        z = poly(e, r) / poly(f, r);
    }
    return q < 0 ? -z : z;
}

HypothesisTest anova_type_test(const EffectEstimate& est, const Eigen::MatrixXd& v_hat,
                               const ContrastSpec& spec, double alpha) {
    const Eigen::MatrixXd& t = spec.projection;
    if (t.rows() != est.p.size() || v_hat.rows() != est.p.size()) {
        throw DimensionError("projection or covariance dimensions do not match the design");
    }
    const Eigen::MatrixXd tv = t * v_hat;
    const double trace_tv = tv.trace();
    if (!(trace_tv > 1e-14)) {
        throw DegenerateVarianceError("estimated variance in the hypothesis space of '" +
                                      spec.label + "' is zero");
    }
    const double trace_tvtv = (tv * tv).trace();
    if (!(trace_tvtv > 0.0)) {
        throw DegenerateVarianceError("degrees-of-freedom denominator vanished for '" +
                                      spec.label + "'");
    }
    HypothesisTest result;
    result.effect = spec.label;
    result.alpha = alpha;
    const double quad = est.p.dot(t * est.p);
    result.statistic = std::max(0.0, static_cast<double>(est.n_total) * quad / trace_tv);
    result.f_hat = trace_tv * trace_tv / trace_tvtv;
    result.p_value = chi2_tail(result.f_hat * result.statistic, result.f_hat);
    return result;
}

WaldTest wald_type_test(const EffectEstimate& est, const Eigen::MatrixXd& v_hat,
                        const Eigen::MatrixXd& c_rows) {
    if (c_rows.cols() != est.p.size()) {
        throw DimensionError("contrast matrix columns do not match the design");
    }
    const Eigen::MatrixXd cvc = c_rows * v_hat * c_rows.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cvc);
    const double max_abs = es.eigenvalues().cwiseAbs().maxCoeff();
    const double cutoff = 1e-12 * max_abs;
    int rank = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        if (std::abs(es.eigenvalues()(i)) > cutoff) ++rank;
    if (rank == 0) {
        throw DegenerateVarianceError("contrast covariance has rank zero");
    }
    WaldTest result;
    result.df = rank;
    const Eigen::VectorXd cp = c_rows * est.p;
    result.statistic = std::max(
        0.0, static_cast<double>(est.n_total) * cp.dot(pinv(cvc) * cp));
    result.p_value = chi2_tail(result.statistic, static_cast<double>(rank));
    return result;
}

EffectCI effect_ci(const EffectEstimate& est, const Eigen::MatrixXd& v_hat, double alpha,
                   CiTransform transform) {
    if (v_hat.rows() != est.p.size()) {
        throw DimensionError("covariance dimensions do not match the effect vector");
    }
    const double z = normal_quantile(1.0 - alpha / 2.0);
    const double sqrt_n = std::sqrt(static_cast<double>(est.n_total));
    EffectCI out;
    out.transform = transform;
    out.alpha = alpha;
    for (int c = 0; c < est.p.size(); ++c) {
        CellInterval cell;
        cell.group = c / 2 + 1;
        cell.period = c % 2 + 1;
        cell.estimate = est.p(c);
        cell.variance = v_hat(c, c);
        const double se = std::sqrt(std::max(0.0, cell.variance)) / sqrt_n;
        if (transform == CiTransform::Identity) {
            cell.lower = cell.estimate - z * se;
            cell.upper = cell.estimate + z * se;
        } else {
            const double p = cell.estimate;
            if (p <= 0.0 || p >= 1.0) {
                cell.boundary = true;
                cell.lower = cell.upper = p;
            } else {
                const double u = std::log(p / (1.0 - p));
                const double gp = 1.0 / (p * (1.0 - p));
                const double h = z * se * gp;
                auto expit = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
                cell.lower = expit(u - h);
                cell.upper = expit(u + h);
            }
        }
        out.cells.push_back(cell);
    }
    return out;
}

}  // namespace clusterfx
