#include <doctest.h>

#include <random>

#include "ggparse/decoder.hpp"
#include "ggparse/scorer.hpp"
#include "ggparse/tree.hpp"
#include "test_helpers.hpp"

using namespace ggparse;

namespace {

DepTree six_word_tree() { return DepTree(std::vector<int>{2, 4, 4, 0, 4, 4}); }

}  // namespace

TEST_CASE("action_score adds arc probability and layer priority") {
    DepTree t = six_word_tree();
    ScoreSet ss = oracle_scores(t);
    CHECK(action_score(ss, 2, 1) == 4.0);  // gold arc for "The": 1 + layer 3

    ScoreSet manual;
    manual.n = 2;
    manual.arc = Eigen::MatrixXd::Zero(3, 3);
    manual.arc_prob = Eigen::MatrixXd::Zero(3, 3);
    manual.arc_prob(0, 1) = 0.7;
    manual.order_logits = Eigen::MatrixXd::Zero(2, kOrderClasses);
    manual.order_logits(0, 2) = 5.0;
    CHECK(action_score(manual, 0, 1) == doctest::Approx(2.7));

    CHECK_THROWS_AS(action_score(manual, 1, 0), std::invalid_argument);
    CHECK_THROWS_AS(action_score(manual, 1, 1), std::invalid_argument);
}

TEST_CASE("same-layer candidates order by arc probability alone") {
    std::mt19937_64 rng(2);
    ScoreSet ss = ggtest::random_score_set(5, rng);
    ss.order_logits.setZero();  // every word in layer 0
    for (int d1 = 1; d1 <= 5; ++d1)
        for (int d2 = 1; d2 <= 5; ++d2)
            if (d1 != d2)
                CHECK((action_score(ss, 0, d1) > action_score(ss, 0, d2)) ==
                      (ss.arc_prob(0, d1) > ss.arc_prob(0, d2)));
}

TEST_CASE("decode_projective: single word") {
    ScoreSet ss = oracle_scores(DepTree(std::vector<int>{0}));
    DepTree t = decode_projective(ss, 1);
    CHECK(t.heads == std::vector<int>{0});
}

TEST_CASE("decode_projective reconstructs all projective trees, n <= 6") {
    for (int n = 1; n <= 6; ++n) {
        enumerate_arborescences(n, [&](const DepTree& t) {
            if (!is_projective(t)) return;
            ScoreSet ss = oracle_scores(t);
            DecodeStats stats;
            DepTree dec = decode_projective(ss, n, &stats);
            CHECK(dec.heads == t.heads);
            CHECK(stats.attachments == n);
        });
    }
}

TEST_CASE("figure-style regression: arc-only greedy attaches root too early") {
    DepTree t = six_word_tree();
    ScoreSet ss = oracle_scores(t);

    DecodeOptions ablated;
    ablated.use_order = false;
    DepTree wrong = decode_projective(ss, 6, nullptr, ablated);
    CHECK(wrong.heads != t.heads);  // "today" and "." cannot reach "come"

    DepTree right = decode_projective(ss, 6);
    CHECK(right.heads == t.heads);
}

TEST_CASE("decode_nonprojective reconstructs every tree, n <= 6") {
    for (int n = 1; n <= 6; ++n) {
        enumerate_arborescences(n, [&](const DepTree& t) {
            ScoreSet ss = oracle_scores(t);
            DecodeStats stats;
            DepTree dec = decode_nonprojective(ss, n, &stats);
            CHECK(dec.heads == t.heads);
            CHECK(stats.attachments == n);
        });
    }
}

TEST_CASE("crossing tree: non-projective decoder recovers it, projective cannot") {
    DepTree crossing(std::vector<int>{0, 4, 1, 1});  // arc 4->2 crosses 1->3
    REQUIRE(validate_tree(crossing).valid);
    REQUIRE_FALSE(is_projective(crossing));
    ScoreSet ss = oracle_scores(crossing);
    CHECK(decode_nonprojective(ss, 4).heads == crossing.heads);
    CHECK(decode_projective(ss, 4).heads != crossing.heads);
    CHECK(is_projective(decode_projective(ss, 4)));
}

TEST_CASE("non-projective processing order: position within equal layers") {
    // all words predicted layer 1; each word must pick its head among the
    // still-pending nodes in position order 1, 2, 3
    ScoreSet ss;
    ss.n = 3;
    ss.arc = Eigen::MatrixXd::Zero(4, 4);
    ss.arc(3, 1) = 5.0;  // word 1 prefers head 3
    ss.arc(1, 2) = 5.0;  // word 2 prefers head 1, but 1 is attached first
    ss.arc(0, 2) = 4.0;
    ss.arc(0, 3) = 1.0;
    ss.arc_prob = ss.arc.unaryExpr([](double x) { return 1.0 / (1.0 + std::exp(-x)); });
    ss.order_logits = Eigen::MatrixXd::Zero(3, kOrderClasses);
    for (int d = 0; d < 3; ++d) ss.order_logits(d, 1) = 1.0;
    DepTree t = decode_nonprojective(ss, 3);
    CHECK(t.heads[0] == 3);
    CHECK(t.heads[1] == 0);  // head 1 already attached, next best is root
    CHECK(t.heads[2] == 0);
    CHECK(validate_tree(t).valid);
}

TEST_CASE("layer dominance in projective decoding") {
    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 100; ++rep) {
        ScoreSet ss = ggtest::random_score_set(6, rng);
        for (int a = 1; a <= 6; ++a)
            for (int b = 1; b <= 6; ++b) {
                if (order_priority(ss, a) <= order_priority(ss, b)) continue;
                for (int ha = 0; ha <= 6; ++ha)
                    for (int hb = 0; hb <= 6; ++hb) {
                        if (ha == a || hb == b) continue;
                        CHECK(action_score(ss, ha, a) > action_score(ss, hb, b));
                    }
            }
    }
}

TEST_CASE("greedy decoders always emit valid trees (fuzz)") {
    std::mt19937_64 rng(23);
    for (int rep = 0; rep < 1000; ++rep) {
        int n = 1 + static_cast<int>(rng() % 12);
        ScoreSet ss = ggtest::random_score_set(n, rng);
        DepTree p = decode_projective(ss, n);
        CHECK(validate_tree(p).valid);
        CHECK(is_projective(p));
        DepTree np = decode_nonprojective(ss, n);
        CHECK(validate_tree(np).valid);
    }
}

TEST_CASE("projective candidate evaluations are exactly n^2") {
    std::mt19937_64 rng(29);
    for (int n : {5, 10, 20}) {
        ScoreSet ss = ggtest::random_score_set(n, rng);
        DecodeStats stats;
        decode_projective(ss, n, &stats);
        CHECK(stats.candidates_evaluated == static_cast<std::int64_t>(n) * n);
    }
}

TEST_CASE("decode_mst equals brute force on random matrices, n <= 6") {
    std::mt19937_64 rng(31);
    for (int rep = 0; rep < 200; ++rep) {
        int n = 1 + static_cast<int>(rng() % 6);
        ScoreSet ss = ggtest::random_score_set(n, rng);
        DepTree t = decode_mst(ss, n);
        REQUIRE(validate_tree(t).valid);
        double score = 0;
        for (int d = 1; d <= n; ++d) score += ss.arc(t.heads[d - 1], d);
        ggtest::BruteMst brute = ggtest::brute_force_mst(ss.arc, n);
        CHECK(score == doctest::Approx(brute.best_score).epsilon(1e-9));
        if (brute.best_trees.size() == 1) CHECK(t.heads == brute.best_trees[0]);
    }
}

TEST_CASE("decode_mst with tied optima still attains the optimum score") {
    ScoreSet ss;
    ss.n = 3;
    ss.arc = Eigen::MatrixXd::Zero(4, 4);  // all trees tie
    ss.arc_prob = ss.arc;
    ss.order_logits = Eigen::MatrixXd::Zero(3, kOrderClasses);
    DepTree t = decode_mst(ss, 3);
    CHECK(validate_tree(t).valid);
    ggtest::BruteMst brute = ggtest::brute_force_mst(ss.arc, 3);
    CHECK(brute.best_score == doctest::Approx(0.0));
}

TEST_CASE("decode_mst on oracle scores returns gold") {
    std::mt19937_64 rng(37);
    for (int rep = 0; rep < 50; ++rep) {
        DepTree t = ggparse::random_tree(2 + rep % 5, rng);
        CHECK(decode_mst(oracle_scores(t), t.n).heads == t.heads);
    }
}

TEST_CASE("assign_labels picks the argmax label at the tree head") {
    DepTree t(std::vector<int>{2, 0});
    ScoreSet ss = oracle_scores(t, 3, {2, 1});
    assign_labels(ss, t, {"root", "nsubj", "det"});
    CHECK(t.labels == std::vector<std::string>{"det", "nsubj"});

    // uniform label scores: lowest id wins
    ScoreSet uni = oracle_scores(t, 3, {2, 1});
    for (auto& m : uni.label) m.setZero();
    DepTree t2(std::vector<int>{2, 0});
    assign_labels(uni, t2, {"root", "nsubj", "det"});
    CHECK(t2.labels == std::vector<std::string>{"root", "root"});
}
