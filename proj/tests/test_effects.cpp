#include <doctest.h>

#include <random>

#include "clusterfx/effects.hpp"
#include "oracles.hpp"
#include "random_study.hpp"

using namespace clusterfx;

TEST_SUITE("effects") {

TEST_CASE("identically distributed cells give uniform effects") {
    std::vector<ClusterRecord> recs;
    for (int j = 1; j <= 2; ++j) {
        recs.push_back({j, "a" + std::to_string(j), {1, 2, 5}, {5, 1, 2}});
        recs.push_back({j, "b" + std::to_string(j), {2, 1, 5}, {1, 5, 2}});
    }
    const EffectEstimate est = estimate_p(StudyData::from_clusters(2, recs));
    for (int c = 0; c < 4; ++c) CHECK(est.p(c) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("two separated cells in a single group") {
    std::vector<ClusterRecord> recs;
    recs.push_back({1, "a", {1, 2}, {3, 4}});
    const EffectEstimate est = estimate_p(StudyData::from_clusters(1, recs));
    CHECK(est.p(0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(est.p(1) == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("effects are column means of the double-sum matrix") {
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 20; ++trial) {
        const StudyData d = cfx_test::random_study(rng);
        const EffectEstimate est = estimate_p(d);
        const Eigen::VectorXd ref = cfx_test::oracle::p_vector(d);
        CHECK((est.p - ref).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("effect mean is one half") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        const StudyData d = cfx_test::random_study(rng);
        const EffectEstimate est = estimate_p(d);
        CHECK(std::abs(est.p.mean() - 0.5) <= 1e-12);
        for (Eigen::Index i = 0; i < est.p.size(); ++i) {
            CHECK(est.p(i) >= 0.0);
            CHECK(est.p(i) <= 1.0);
        }
    }
}

TEST_CASE("monotone transformation leaves effects bit-identical") {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 10; ++trial) {
        const StudyData d = cfx_test::random_study(rng);
        std::vector<ClusterRecord> recs = d.clusters();
        for (ClusterRecord& c : recs) {
            for (double& x : c.pre) x = x * x * x + x;
            for (double& x : c.post) x = x * x * x + x;
        }
        const StudyData d2 = StudyData::from_clusters(d.num_groups(), std::move(recs));
        const Eigen::VectorXd p1 = estimate_p(d).p;
        const Eigen::VectorXd p2 = estimate_p(d2).p;
        CHECK((p1 - p2).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("decomposition of a flat vector is zero") {
    Eigen::VectorXd p = Eigen::VectorXd::Constant(6, 0.5);
    const EffectDecomposition d = decompose(p, 3);
    CHECK(d.alpha.cwiseAbs().maxCoeff() == 0.0);
    CHECK(d.beta.cwiseAbs().maxCoeff() == 0.0);
    CHECK(d.alphabeta.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("decomposition of a pure period effect") {
    Eigen::VectorXd p(4);
    p << 0.4, 0.6, 0.4, 0.6;
    const EffectDecomposition d = decompose(p, 2);
    CHECK(d.alpha.cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(d.beta(0) == doctest::Approx(-0.1).epsilon(1e-14));
    CHECK(d.beta(1) == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(d.alphabeta.cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("decomposition side conditions and reconstruction") {
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const int t = 1 + static_cast<int>(rng() % 4);
        Eigen::VectorXd p(2 * t);
        for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = unif(rng);
        const EffectDecomposition d = decompose(p, t);
        CHECK(std::abs(d.alpha.sum()) <= 1e-14);
        CHECK(std::abs(d.beta.sum()) <= 1e-15);
        for (int j = 0; j < t; ++j) CHECK(std::abs(d.alphabeta.row(j).sum()) <= 1e-14);
        for (int l = 0; l < 2; ++l) CHECK(std::abs(d.alphabeta.col(l).sum()) <= 1e-14);
        // the reconstruction offset is the overall mean, 1/2 for genuine
        // effect vectors; generic vectors reconstruct through their mean
        const double g = p.mean();
        for (int j = 0; j < t; ++j)
            for (int l = 0; l < 2; ++l)
                CHECK(std::abs(d.alpha(j) + d.beta(l) + d.alphabeta(j, l) + g - p(2 * j + l)) <=
                      1e-14);
    }
}

TEST_CASE("decomposition rejects mismatched lengths") {
    CHECK_THROWS_AS(decompose(Eigen::VectorXd::Zero(5), 3), DimensionError);
}

}  // TEST_SUITE
