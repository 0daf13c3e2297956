#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "clusterfx/data.hpp"

namespace clusterfx {

enum class Family { DiscretizedNormal, LogNormal, Cauchy };
enum class Alternative { Null, OnePoint, OneTime, IncreasingTrend };

// Deterministic random stream. Replications use independent substreams
// derived from (seed, index), so parallel runs aggregate to bit-identical
// results at any thread count.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(mix(seed)) {}
    static Rng substream(std::uint64_t seed, std::uint64_t index) {
        return Rng(mix(seed) ^ mix(index * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL));
    }

    // uniform on [0,1)
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    // uniform on (0,1), never hitting either endpoint
    double uniform_open() { return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53; }
    // standard normal via the inverse CDF
    double normal();

private:
    static std::uint64_t mix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }
    std::mt19937_64 eng_;
};

struct SimulationConfig {
    Family family = Family::DiscretizedNormal;
    int num_groups = 3;
    int n_complete = 5;   // complete clusters per group
    int n_pre = 10;       // pre-only clusters per group
    int n_post = 5;       // post-only clusters per group
    int max_cluster_size = 3;               // 3 or 6
    std::array<double, 3> rho{0.9, 0.9, 0.1};    // within-pre, within-post, cross-period
    std::array<double, 2> sigma2{1.0, 1.0};
    Alternative alternative = Alternative::Null;
    double delta = 0.0;
    int runs = 1000;
    double alpha = 0.05;
    std::uint64_t seed = 20240101;

    // Throws BadConfigError for out-of-range entries and NotPsdError when the
    // correlation triple is infeasible for some achievable cluster-size pair.
    void validate_or_throw() const;
};

// Key = value configuration with '#' comments; rho and sigma2 accept either
// comma-separated tuples or nested blocks.
SimulationConfig parse_config(std::istream& in);
SimulationConfig load_config(const std::string& path);
std::string config_to_string(const SimulationConfig& config);

const char* family_name(Family f);
const char* alternative_name(Alternative a);

// Cluster size draw: Binomial(max_size - 1, 0.3) + 1, support 1..max_size.
int gen_cluster_sizes(int max_cluster_size, Rng& rng);

// Joint covariance of one cluster's pre and post observations: compound
// symmetry within each period and a constant cross-period block.
// Throws NotPsdError when the result is not positive semidefinite.
Eigen::MatrixXd block_cov(int m_pre, int m_post, const std::array<double, 3>& rho,
                          const std::array<double, 2>& sigma2);

// One cluster draw from the requested family with the given location shifts.
// cov is a block_cov result whose first m_pre coordinates belong to the pre
// period; the draw uses a symmetric PSD square-root factorization.
std::pair<std::vector<double>, std::vector<double>> gen_cluster(Family family, double mean_pre,
                                                                double mean_post,
                                                                const Eigen::MatrixXd& cov,
                                                                int m_pre, Rng& rng);

// T x 2 grid of location shifts for the requested alternative.
Eigen::MatrixXd apply_alternative(Alternative kind, double delta, int num_groups = 3);

// One replication dataset: complete clusters keep both periods, incomplete
// ones are drawn from the same joint model with one period discarded.
StudyData gen_study(const SimulationConfig& config, Rng& rng);

struct SimulationReport {
    struct EffectRow {
        std::string effect;
        double rate_pct = 0.0;   // rejection rate x 100
        double mc_se_pct = 0.0;  // Monte Carlo standard error x 100
    };
    std::array<EffectRow, 3> effects;  // intervention, time, interaction
    int runs = 0;
    long long degenerate_reps = 0;
    std::vector<std::pair<std::string, long long>> warning_counts;
};

// Runs the Monte Carlo experiment; threads <= 0 selects the hardware
// concurrency. The report is identical for any thread count.
SimulationReport run_experiment(const SimulationConfig& config, int threads = 0);

std::string report_csv(const SimulationReport& report);
std::string report_json(const SimulationReport& report, const SimulationConfig& config);

}  // namespace clusterfx
