#include <doctest.h>

#include <cstdio>
#include <random>

#include "ggparse/scores_io.hpp"
#include "ggparse/tree.hpp"
#include "test_helpers.hpp"

using namespace ggparse;

namespace {

bool sets_equal(const ScoreSet& a, const ScoreSet& b) {
    if (a.n != b.n || a.num_labels() != b.num_labels()) return false;
    if (a.arc != b.arc) return false;
    if (a.order_logits != b.order_logits) return false;
    for (std::size_t i = 0; i < a.label.size(); ++i)
        if (a.label[i] != b.label[i]) return false;
    return true;
}

}  // namespace

TEST_CASE("round trip preserves every value bit-for-bit") {
    std::mt19937_64 rng(3);
    std::vector<ScoreSet> sets;
    for (int i = 0; i < 20; ++i) {
        int n = 1 + static_cast<int>(rng() % 9);
        ScoreSet ss = ggtest::random_score_set(n, rng);
        if (i % 2 == 0) {
            // attach random label scores to half the sets
            int L = 2 + static_cast<int>(rng() % 3);
            ss.label.assign(n, Eigen::MatrixXd());
            for (int d = 0; d < n; ++d)
                ss.label[d] = ggtest::random_matrix(n + 1, L, rng);
        }
        sets.push_back(std::move(ss));
    }
    std::vector<ScoreSet> back = parse_scores(format_scores(sets));
    REQUIRE(back.size() == sets.size());
    for (std::size_t i = 0; i < sets.size(); ++i) CHECK(sets_equal(sets[i], back[i]));
}

TEST_CASE("formatting parsed text again is byte-stable") {
    std::mt19937_64 rng(5);
    std::vector<ScoreSet> sets{ggtest::random_score_set(4, rng),
                               ggtest::random_score_set(7, rng)};
    std::string once = format_scores(sets);
    std::string twice = format_scores(parse_scores(once));
    CHECK(once == twice);
}

TEST_CASE("arc probabilities are recomputed on read") {
    DepTree t(std::vector<int>{2, 0, 2});
    ScoreSet ss = oracle_scores(t);
    std::vector<ScoreSet> back = parse_scores(format_scores({ss}));
    REQUIRE(back.size() == 1);
    CHECK(back[0].arc_prob(2, 1) == 1.0);
    CHECK(back[0].arc_prob(1, 2) == 0.0);
}

TEST_CASE("empty corpus round trips to an empty corpus") {
    std::string text = format_scores({});
    CHECK(parse_scores(text).empty());
}

TEST_CASE("missing or wrong header is rejected") {
    CHECK_THROWS_AS(parse_scores(""), std::runtime_error);
    CHECK_THROWS_AS(parse_scores("#something-else v1\n"), std::runtime_error);
}

TEST_CASE("malformed sentence header is rejected") {
    CHECK_THROWS_AS(parse_scores("#ggparse-scores v1\nblock 3 0\n"), std::runtime_error);
    CHECK_THROWS_AS(parse_scores("#ggparse-scores v1\nsent x 0\n"), std::runtime_error);
}

TEST_CASE("truncated and short blocks are rejected") {
    std::mt19937_64 rng(7);
    std::string text = format_scores({ggtest::random_score_set(3, rng)});
    // drop the last non-empty line
    std::size_t end = text.find_last_not_of('\n');
    std::size_t cut = text.rfind('\n', end);
    CHECK_THROWS_AS(parse_scores(text.substr(0, cut + 1)), std::runtime_error);
    // shorten one row
    std::size_t first_row = text.find('\n', text.find("sent")) + 1;
    std::size_t row_end = text.find('\n', first_row);
    std::string shortened = text.substr(0, first_row) + "1.0 2.0\n" + text.substr(row_end + 1);
    CHECK_THROWS_AS(parse_scores(shortened), std::runtime_error);
}

TEST_CASE("file round trip through write_scores and read_scores") {
    std::mt19937_64 rng(11);
    std::vector<ScoreSet> sets{ggtest::random_score_set(5, rng)};
    std::string path = "scores_io_test.tmp";
    write_scores(sets, path);
    std::vector<ScoreSet> back = read_scores(path);
    std::remove(path.c_str());
    REQUIRE(back.size() == 1);
    CHECK(sets_equal(sets[0], back[0]));
    CHECK_THROWS_AS(read_scores("no/such/dir/scores.txt"), std::runtime_error);
}
