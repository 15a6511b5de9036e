// End-to-end acceptance checks. Each numbered criterion prints one PASS/FAIL
// line; the process exits nonzero if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include "ggparse/conll.hpp"
#include "ggparse/decoder.hpp"
#include "ggparse/eval.hpp"
#include "ggparse/scorer.hpp"
#include "ggparse/synthetic.hpp"
#include "ggparse/training.hpp"
#include "ggparse/tree.hpp"
#include "test_helpers.hpp"

using namespace ggparse;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what) {
    std::printf("%s  %2d: %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
    if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1 & 2: greedy decoders rebuild gold trees from oracle scores
void check_oracle_reconstruction() {
    auto t0 = std::chrono::steady_clock::now();
    bool proj_ok = true, nonproj_ok = true;
    for (int n = 1; n <= 6; ++n) {
        enumerate_arborescences(n, [&](const DepTree& t) {
            ScoreSet ss = oracle_scores(t);
            if (is_projective(t) && decode_projective(ss, n).heads != t.heads)
                proj_ok = false;
            if (decode_nonprojective(ss, n).heads != t.heads) nonproj_ok = false;
        });
    }
    std::mt19937_64 rng(101);
    for (int rep = 0; rep < 1000; ++rep) {
        int n = 1 + static_cast<int>(rng() % 40);
        DepTree p = random_projective_tree(n, rng);
        if (decode_projective(oracle_scores(p), n).heads != p.heads) proj_ok = false;
        DepTree a = random_tree(n, rng);
        if (decode_nonprojective(oracle_scores(a), n).heads != a.heads) nonproj_ok = false;
    }
    double secs = seconds_since(t0);
    report(1, proj_ok && secs < 60,
           "projective decoder reconstructs gold from oracle scores (exhaustive n<=6 + "
           "1000 random, " + std::to_string(secs).substr(0, 4) + "s)");
    report(2, nonproj_ok,
           "non-projective decoder reconstructs gold from oracle scores");
}

// 3: the six-word regression tree needs the order objective
void check_figure_regression() {
    DepTree t(std::vector<int>{2, 4, 4, 0, 4, 4});
    ScoreSet ss = oracle_scores(t);
    DecodeOptions ablated;
    ablated.use_order = false;
    bool arc_only_fails = decode_projective(ss, 6, nullptr, ablated).heads != t.heads;
    bool with_order_ok = decode_projective(ss, 6).heads == t.heads;
    report(3, arc_only_fails && with_order_ok,
           "six-word regression: arc-only greedy fails, order-augmented succeeds");
}

// 4: Chu-Liu/Edmonds against exhaustive search
void check_mst() {
    std::mt19937_64 rng(103);
    bool ok = true;
    for (int rep = 0; rep < 500; ++rep) {
        int n = 1 + static_cast<int>(rng() % 6);
        ScoreSet ss = ggtest::random_score_set(n, rng);
        DepTree t = decode_mst(ss, n);
        if (!validate_tree(t).valid) {
            ok = false;
            continue;
        }
        double score = 0;
        for (int d = 1; d <= n; ++d) score += ss.arc(t.heads[d - 1], d);
        ggtest::BruteMst brute = ggtest::brute_force_mst(ss.arc, n);
        if (std::abs(score - brute.best_score) > 1e-9) ok = false;
    }
    report(4, ok, "MST decoder matches brute-force optimum on 500 random inputs");
}

// 5: analytic gradients vs central finite differences
void check_gradients() {
    Config cfg;
    cfg.word_dim = 8;
    cfg.pos_dim = 4;
    cfg.char_dim = 3;
    cfg.char_filters = 5;
    cfg.hidden_dim = 6;
    cfg.arc_dim = 6;
    cfg.order_dim = 5;
    cfg.label_dim = 4;
    cfg.min_word_freq = 1;
    cfg.embed_dropout = 0;
    cfg.recurrent_dropout = 0;
    auto sents = synthetic_treebank(1, 3, 3, 107, true);
    std::mt19937_64 rng0(109);
    Model model = init_model(cfg, build_vocab(sents, 1), rng0);
    std::vector<const Sentence*> batch{&sents[0]};
    ParamSet grads;
    std::mt19937_64 rng(0);
    gradients(batch, model, grads, ScoreMode::kEval, rng);

    auto loss_of = [&]() {
        ScoreSet ss = score_sentence(sents[0], model);
        return loss(sents[0], gold_tree(sents[0]), ss, &model.vocab).total();
    };
    const double h = 1e-4;
    bool ok = true;
    std::vector<Eigen::MatrixXd*> gs;
    grads.visit([&](const std::string&, Eigen::MatrixXd& m) { gs.push_back(&m); });
    std::size_t gi = 0;
    model.params.visit([&](const std::string& name, Eigen::MatrixXd& p) {
        Eigen::MatrixXd& g = *gs[gi++];
        std::mt19937_64 pick(std::hash<std::string>{}(name) ^ 0x9e3779b9);
        int samples = std::min<int>(4, static_cast<int>(p.size()));
        for (int s = 0; s < samples; ++s) {
            Eigen::Index idx = static_cast<Eigen::Index>(pick() % p.size());
            double orig = p.data()[idx];
            p.data()[idx] = orig + h;
            double up = loss_of();
            p.data()[idx] = orig - h;
            double down = loss_of();
            p.data()[idx] = orig;
            double fd = (up - down) / (2 * h);
            double analytic = g.data()[idx];
            double denom = std::max(std::abs(fd), std::abs(analytic));
            if (denom < 1e-6 ? std::abs(fd - analytic) > 1e-6
                             : std::abs(fd - analytic) / denom > 1e-3)
                ok = false;
        }
    });
    report(5, ok && gi == gs.size(),
           "analytic gradients match finite differences for every parameter group");
}

// 6: overfit a 50-sentence synthetic fixture
void check_overfit() {
    auto t0 = std::chrono::steady_clock::now();
    auto sents = synthetic_treebank(50, 4, 9, 113, true);
    Config cfg;
    cfg.word_dim = 32;
    cfg.pos_dim = 12;
    cfg.char_dim = 6;
    cfg.char_filters = 12;
    cfg.hidden_dim = 64;
    cfg.arc_dim = 48;
    cfg.order_dim = 32;
    cfg.label_dim = 16;
    cfg.min_word_freq = 1;
    cfg.batch_size = 4;
    cfg.learning_rate = 2e-3;
    cfg.max_epochs = 200;
    cfg.patience = 10;
    cfg.seed = 5;
    TrainResult res = train(cfg, sents, sents, DecoderKind::kGreedyProjective, nullptr);

    // re-score the training set with the best checkpoint
    std::vector<DepTree> preds;
    std::vector<LayerAssignment> gold_layers;
    std::vector<std::vector<int>> pred_layers;
    for (const Sentence& s : sents) {
        ScoreSet ss = score_sentence(s, res.model);
        preds.push_back(decode_projective(ss, s.size()));
        gold_layers.push_back(compute_layers(gold_tree(s)));
        std::vector<int> pl;
        for (int d = 1; d <= s.size(); ++d) pl.push_back(order_priority(ss, d));
        pred_layers.push_back(std::move(pl));
    }
    double uas = attachment_scores(sents, preds, PunctConvention::kUd).uas;
    double order_acc = order_accuracy(gold_layers, pred_layers);

    double secs = seconds_since(t0);
    std::ostringstream msg;
    msg.precision(1);
    msg << std::fixed << "overfits 50-sentence fixture: UAS " << 100 * uas
        << "%, order acc " << 100 * order_acc << "% in " << res.log.size()
        << " epochs, " << secs << "s";
    report(6, uas >= 0.95 && order_acc >= 0.90 && secs < 300, msg.str());
}

// 7: decoding cost scaling
void check_scaling() {
    std::mt19937_64 rng(127);
    std::vector<std::int64_t> cands;
    for (int n : {10, 20, 40}) {
        ScoreSet ss = ggtest::random_score_set(n, rng);
        DecodeStats stats;
        decode_projective(ss, n, &stats);
        cands.push_back(stats.candidates_evaluated);
    }
    double r1 = static_cast<double>(cands[1]) / cands[0];
    double r2 = static_cast<double>(cands[2]) / cands[0];
    bool ratios_ok = std::abs(r1 - 4.0) <= 1.0 && std::abs(r2 - 16.0) <= 4.0;

    const int n = 1000;
    ScoreSet big = ggtest::random_score_set(n, rng);
    DecodeStats stats;
    decode_nonprojective(big, n, &stats);
    double bound = 3.0 * n * std::log2(static_cast<double>(n));
    bool sort_ok = stats.sort_comparisons <= static_cast<std::int64_t>(bound);

    std::ostringstream msg;
    msg << "decode cost scaling: candidate ratios " << r1 << "/" << r2
        << " (want 4/16 +-25%), sort comparisons " << stats.sort_comparisons
        << " <= " << static_cast<std::int64_t>(bound) << " at n=1000";
    report(7, ratios_ok && sort_ok, msg.str());
}

// 8: fuzz all decoders for structural validity
void check_fuzz() {
    std::mt19937_64 rng(131);
    bool ok = true;
    for (int rep = 0; rep < 10000; ++rep) {
        int n = 1 + static_cast<int>(rng() % 12);
        ScoreSet ss = ggtest::random_score_set(n, rng);
        DepTree p = decode_projective(ss, n);
        if (!validate_tree(p).valid || !is_projective(p)) ok = false;
        if (!validate_tree(decode_nonprojective(ss, n)).valid) ok = false;
        if (!validate_tree(decode_mst(ss, n)).valid) ok = false;
    }
    report(8, ok, "10,000 random score sets: every decoder emits a valid tree");
}

// 9: closed-form arc loss under uniform scores
void check_uniform_loss() {
    bool ok = true;
    std::mt19937_64 rng(137);
    for (int n : {1, 2, 3, 7, 15}) {
        std::vector<int> heads(n, 0);
        DepTree t(heads);
        Sentence s = synthetic_sentence(t, 0, rng);
        ScoreSet ss;
        ss.n = n;
        ss.arc = Eigen::MatrixXd::Zero(n + 1, n + 1);
        ss.arc_prob = Eigen::MatrixXd::Constant(n + 1, n + 1, 0.5);
        ss.order_logits = Eigen::MatrixXd::Zero(n, kOrderClasses);
        double l_arc = loss(s, t, ss).l_arc;
        if (std::abs(l_arc - n * std::log(static_cast<double>(n))) > 1e-9) ok = false;
    }
    report(9, ok, "uniform arc scores give l_arc = n log n exactly");
}

// 10: treebank I/O round trip on the bundled samples
void check_roundtrip() {
    bool ok = true;
    struct Case {
        const char* file;
        ConllFormat format;
    };
    for (const Case& c : {Case{"/sample.conllu", ConllFormat::kConllU},
                          Case{"/sample.conllx", ConllFormat::kConllX}}) {
        std::string path = std::string(GGPARSE_DATA_DIR) + c.file;
        auto sents = read_conll(path, c.format);
        if (sents.size() != 20) ok = false;
        std::vector<DepTree> trees;
        for (const auto& s : sents) trees.push_back(gold_tree(s));
        std::string once = format_conll(sents, trees, c.format);
        auto back = parse_conll(once, c.format);
        std::vector<DepTree> back_trees;
        for (const auto& s : back) back_trees.push_back(gold_tree(s));
        std::string twice = format_conll(back, back_trees, c.format);
        if (once != twice) ok = false;
    }
    report(10, ok, "bundled treebanks survive a read-write-read cycle byte-for-byte");
}

}  // namespace

int main() {
    check_oracle_reconstruction();
    check_figure_regression();
    check_mst();
    check_gradients();
    check_overfit();
    check_scaling();
    check_fuzz();
    check_uniform_loss();
    check_roundtrip();
    std::printf("%s (%d failure%s)\n", failures == 0 ? "ALL PASS" : "FAILED", failures,
                failures == 1 ? "" : "s");
    return failures == 0 ? 0 : 1;
}
