#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "support.hpp"

using namespace evoselect;
using namespace evoselect::testing;

using Labels = std::vector<std::uint8_t>;

TEST(Accuracy, Examples) {
    EXPECT_EQ(accuracy(Labels{1, 0, 1}, Labels{1, 0, 1}), 1.0);
    EXPECT_EQ(accuracy(Labels{1, 1, 1, 1}, Labels{0, 0, 0, 0}), 0.0);
    EXPECT_EQ(accuracy(Labels{1, 0, 0, 1}, Labels{1, 1, 0, 0}), 0.5);
    EXPECT_THROW(accuracy(Labels{1}, Labels{1, 0}), DataError);
    EXPECT_THROW(accuracy(Labels{}, Labels{}), DataError);
}

TEST(F1, Examples) {
    EXPECT_EQ(f1(Labels{1, 0, 1}, Labels{1, 0, 1}), 1.0);
    EXPECT_EQ(f1(Labels{0, 0}, Labels{0, 0}), 0.0);
    EXPECT_EQ(f1(Labels{1, 1, 0}, Labels{1, 0, 1}), 0.5);
    EXPECT_THROW(f1(Labels{1}, Labels{}), DataError);
}

TEST(RocAuc, Examples) {
    EXPECT_EQ(roc_auc(std::vector<double>{0, 1, 1, 0}, Labels{0, 1, 1, 0}), 1.0);
    EXPECT_EQ(roc_auc(std::vector<double>{0.3, 0.3, 0.3}, Labels{0, 1, 1}), 0.5);
    // pairs (pos, neg): (.35,.1) win, (.35,.4) loss, (.8,.1) win, (.8,.4) win
    EXPECT_EQ(roc_auc(std::vector<double>{0.1, 0.4, 0.35, 0.8}, Labels{0, 0, 1, 1}), 0.75);
    try {
        roc_auc(std::vector<double>{0.1, 0.2}, Labels{1, 1});
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("AUC undefined"), std::string::npos);
    }
}

TEST(RocAuc, MatchesPairCountingWithTies) {
    std::mt19937 gen(123);
    for (int t = 0; t < 1000; ++t) {
        const std::size_t n = 2 + gen() % 11;
        std::vector<double> s(n);
        Labels y(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = static_cast<double>(gen() % 5) * 0.25; // heavy ties
            y[i] = static_cast<std::uint8_t>(gen() % 2);
        }
        y[0] = 0;
        y[1] = 1;
        ASSERT_EQ(roc_auc(s, y), brute_force_auc(s, y));
    }
}

TEST(RocAuc, ComplementAndMonotoneInvariance) {
    std::mt19937 gen(9);
    std::normal_distribution<double> normal;
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 5 + gen() % 40;
        std::vector<double> s(n);
        Labels y(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = std::round(normal(gen) * 4.0) / 4.0;
            y[i] = static_cast<std::uint8_t>(gen() % 2);
        }
        y[0] = 0;
        y[1] = 1;
        std::vector<double> neg(n);
        std::vector<double> warped(n);
        std::transform(s.begin(), s.end(), neg.begin(), [](double v) { return -v; });
        std::transform(s.begin(), s.end(), warped.begin(), [](double v) { return std::exp(3.0 * v) + 7.0; });
        const double a = roc_auc(s, y);
        EXPECT_NEAR(a + roc_auc(neg, y), 1.0, 1e-12);
        EXPECT_EQ(a, roc_auc(warped, y));
    }
}

TEST(Metrics, PermutationInvariance) {
    std::mt19937 gen(4);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 1 + gen() % 30;
        Labels p(n);
        Labels y(n);
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = static_cast<std::uint8_t>(gen() % 2);
            y[i] = static_cast<std::uint8_t>(gen() % 2);
        }
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), gen);
        Labels pp(n);
        Labels yy(n);
        for (std::size_t i = 0; i < n; ++i) {
            pp[i] = p[perm[i]];
            yy[i] = y[perm[i]];
        }
        EXPECT_EQ(accuracy(p, y), accuracy(pp, yy));
        EXPECT_EQ(f1(p, y), f1(pp, yy));
    }
}

TEST(EvaluateScores, ThresholdAtOneHalf) {
    const std::vector<double> s{0.5, 0.49, 0.9, 0.1};
    const Labels y{1, 0, 1, 1};
    const auto r = evaluate_scores(s, y);
    EXPECT_EQ(r.accuracy, 0.75);
    EXPECT_EQ(r.f1, 0.8);
    EXPECT_EQ(r.get(Metric::f1), r.f1);
    EXPECT_EQ(r.get(Metric::roc_auc), r.roc_auc);
}

TEST(Jaccard, Examples) {
    const Chromosome c{1, 0, 1, 1};
    EXPECT_EQ(jaccard(c, c), 1.0);
    EXPECT_EQ(jaccard(Chromosome{1, 0}, Chromosome{0, 1}), 0.0);
    EXPECT_DOUBLE_EQ(jaccard(Chromosome{1, 1, 0}, Chromosome{1, 0, 1}), 1.0 / 3.0);
    EXPECT_THROW(jaccard(Chromosome{0, 0}, Chromosome{0, 0}), DataError);
    EXPECT_THROW(jaccard(Chromosome{1}, Chromosome{1, 0}), DataError);
}

TEST(Jaccard, SymmetricAndOneOnlyForEqual) {
    for (std::uint32_t a = 1; a < 64; ++a) {
        for (std::uint32_t b = 1; b < 64; ++b) {
            const auto ca = chromosome_of(bits_of(a, 6));
            const auto cb = chromosome_of(bits_of(b, 6));
            ASSERT_EQ(jaccard(ca, cb), jaccard(cb, ca));
            ASSERT_EQ(jaccard(ca, cb) == 1.0, a == b);
        }
    }
}
