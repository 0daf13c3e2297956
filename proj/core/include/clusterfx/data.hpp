#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "clusterfx/errors.hpp"

namespace clusterfx {

// The design has exactly two intervention periods.
enum class Period : int { Pre = 1, Post = 2 };

enum class ClusterStatus { Complete, IncompletePre, IncompletePost };

// One independent cluster: a group label, an opaque id and the observation
// vectors for the two periods (visit order preserved). At least one period
// must be non-empty; completeness is derived, never stored.
struct ClusterRecord {
    int group = 0;  // 1-based intervention group label
    std::string id;
    std::vector<double> pre;
    std::vector<double> post;

    ClusterStatus status() const {
        if (!pre.empty() && !post.empty()) return ClusterStatus::Complete;
        return pre.empty() ? ClusterStatus::IncompletePost : ClusterStatus::IncompletePre;
    }
    bool complete() const { return !pre.empty() && !post.empty(); }

    // l is the 0-based period index (0 = pre, 1 = post).
    const std::vector<double>& period(int l) const { return l == 0 ? pre : post; }

    bool operator==(const ClusterRecord&) const = default;
};

// Immutable container for a T x 2 pre-post factorial design with partially
// complete clusters. Derived counts and per-cell sorted observation arrays
// are built once at construction; instances are safe to share across threads.
//
// Cells are indexed lexicographically: cell(j, l) = 2*j + l with 0-based
// group j and period l, i.e. (1,pre), (1,post), (2,pre), ...
class StudyData {
public:
    StudyData() = default;

    // Validates invariants: group labels in 1..num_groups, no cluster empty in
    // both periods, and every cell holding at least one observation.
    static StudyData from_clusters(int num_groups, std::vector<ClusterRecord> clusters);

    int num_groups() const { return num_groups_; }
    int num_cells() const { return 2 * num_groups_; }
    static int cell_index(int j, int l) { return 2 * j + l; }

    const std::vector<ClusterRecord>& clusters() const { return clusters_; }

    // Cluster counts (0-based j, l).
    int complete_clusters(int j) const { return static_cast<int>(complete_idx_[j].size()); }
    int incomplete_clusters(int j, int l) const {
        return static_cast<int>(incomplete_idx_[2 * j + l].size());
    }
    int group_clusters(int j) const;

    // Observation counts.
    long long cell_count(int j, int l) const { return n_cell_[2 * j + l]; }
    long long cell_count_complete(int j, int l) const { return n_cell_complete_[2 * j + l]; }
    long long cell_count_incomplete(int j, int l) const {
        return n_cell_[2 * j + l] - n_cell_complete_[2 * j + l];
    }
    long long group_count(int j) const { return n_cell_[2 * j] + n_cell_[2 * j + 1]; }
    long long total_count() const { return n_total_; }

    // All observations of cell (j,l) in ascending order.
    const std::vector<double>& sorted_cell(int j, int l) const { return sorted_[2 * j + l]; }

    // Indices into clusters() of the complete clusters of group j, and of the
    // incomplete clusters observed in cell (j,l); order follows clusters().
    const std::vector<int>& complete_index(int j) const { return complete_idx_[j]; }
    const std::vector<int>& incomplete_index(int j, int l) const {
        return incomplete_idx_[2 * j + l];
    }

    bool operator==(const StudyData& other) const {
        return num_groups_ == other.num_groups_ && clusters_ == other.clusters_;
    }

private:
    int num_groups_ = 0;
    std::vector<ClusterRecord> clusters_;
    std::vector<std::vector<int>> complete_idx_;    // [group]
    std::vector<std::vector<int>> incomplete_idx_;  // [cell]
    std::vector<long long> n_cell_;                 // [cell]
    std::vector<long long> n_cell_complete_;        // [cell]
    long long n_total_ = 0;
    std::vector<std::vector<double>> sorted_;       // [cell]
};

// CSV ingestion. Expected header: group,cluster,period,visit,value.
// '#' comment lines and blank lines are skipped; fields may carry spaces.
StudyData load_csv(const std::string& path);
StudyData parse_csv(std::istream& in);

// Serialization; parse_csv(to_csv(d)) reproduces d exactly.
std::string to_csv(const StudyData& data);
void write_csv(const StudyData& data, const std::string& path);

// Estimability checks. Returns human-readable warnings; never throws.
std::vector<std::string> validate(const StudyData& data);

}  // namespace clusterfx
