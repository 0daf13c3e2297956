#pragma once

#include <random>

#include "clusterfx/data.hpp"

namespace cfx_test {

// Small random datasets with mixed complete/incomplete clusters and tie-rich
// values. Integer lattices keep strictly monotone transforms exactly
// order-preserving, so bit-identity checks are well posed.
struct RandomStudyOptions {
    int min_groups = 1;
    int max_groups = 3;
    int max_cluster_size = 4;  // observations per period, 1..max
    int max_complete = 4;      // complete clusters per group, 0..max
    int max_incomplete = 3;    // incomplete clusters per cell, 0..max
    int value_range = 5;       // integers in [-value_range, value_range]
    bool quarter_lattice = false;  // values k/4 instead of integers
};

clusterfx::StudyData random_study(std::mt19937_64& rng, const RandomStudyOptions& options = {});

}  // namespace cfx_test
