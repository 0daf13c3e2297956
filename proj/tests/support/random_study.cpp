#include "random_study.hpp"

#include <string>

namespace cfx_test {

using clusterfx::ClusterRecord;
using clusterfx::StudyData;

StudyData random_study(std::mt19937_64& rng, const RandomStudyOptions& opt) {
    std::uniform_int_distribution<int> group_count(opt.min_groups, opt.max_groups);
    std::uniform_int_distribution<int> complete_count(0, opt.max_complete);
    std::uniform_int_distribution<int> incomplete_count(0, opt.max_incomplete);
    std::uniform_int_distribution<int> cluster_size(1, opt.max_cluster_size);
    std::uniform_int_distribution<int> integers(-opt.value_range, opt.value_range);
    std::uniform_int_distribution<int> quarters(-4 * opt.value_range, 4 * opt.value_range);

    const int t = group_count(rng);
    auto draw_values = [&](int m) {
        std::vector<double> v(static_cast<std::size_t>(m));
        for (double& x : v) {
            x = opt.quarter_lattice ? static_cast<double>(quarters(rng)) / 4.0
                                    : static_cast<double>(integers(rng));
        }
        return v;
    };

    std::vector<ClusterRecord> records;
    for (int j = 0; j < t; ++j) {
        int n_c = complete_count(rng);
        int n_1 = incomplete_count(rng);
        int n_2 = incomplete_count(rng);
        if (n_c == 0) {  // both cells must still be populated
            n_1 = std::max(n_1, 1);
            n_2 = std::max(n_2, 1);
        }
        int serial = 0;
        for (int k = 0; k < n_c; ++k) {
            ClusterRecord rec;
            rec.group = j + 1;
            rec.id = "g" + std::to_string(j + 1) + "c" + std::to_string(++serial);
            rec.pre = draw_values(cluster_size(rng));
            rec.post = draw_values(cluster_size(rng));
            records.push_back(std::move(rec));
        }
        for (int k = 0; k < n_1; ++k) {
            ClusterRecord rec;
            rec.group = j + 1;
            rec.id = "g" + std::to_string(j + 1) + "p" + std::to_string(++serial);
            rec.pre = draw_values(cluster_size(rng));
            records.push_back(std::move(rec));
        }
        for (int k = 0; k < n_2; ++k) {
            ClusterRecord rec;
            rec.group = j + 1;
            rec.id = "g" + std::to_string(j + 1) + "q" + std::to_string(++serial);
            rec.post = draw_values(cluster_size(rng));
            records.push_back(std::move(rec));
        }
    }
    return StudyData::from_clusters(t, std::move(records));
}

}  // namespace cfx_test
