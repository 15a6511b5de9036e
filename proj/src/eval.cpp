#include "ggparse/eval.hpp"

#include <algorithm>
#include <chrono>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "ggparse/scorer.hpp"
#include "ggparse/tree.hpp"

namespace ggparse {

EvalReport attachment_scores(const std::vector<Sentence>& gold,
                             const std::vector<DepTree>& pred,
                             PunctConvention convention) {
    if (gold.size() != pred.size())
        throw std::invalid_argument("attachment_scores: corpus size mismatch");
    EvalReport rep;
    long correct = 0, correct_lab = 0;
    for (std::size_t s = 0; s < gold.size(); ++s) {
        const Sentence& sent = gold[s];
        const DepTree& tree = pred[s];
        if (tree.n != sent.size())
            throw std::invalid_argument("attachment_scores: sentence " + sent.source_id +
                                        " length mismatch");
        SentenceEval se;
        se.source_id = sent.source_id;
        int roots = 0;
        for (const Token& tok : sent.tokens) {
            ++rep.total_tokens;
            if (tree.heads[tok.index - 1] == 0) ++roots;
            if (is_punctuation(tok, convention)) {
                ++se.excluded;
                ++rep.excluded_punct;
                continue;
            }
            ++se.scored;
            ++rep.scored_tokens;
            if (tree.heads[tok.index - 1] == tok.gold_head) {
                ++se.correct_heads;
                ++correct;
                if (!tree.labels.empty() &&
                    tree.labels[tok.index - 1] == tok.gold_label) {
                    ++se.correct_labeled;
                    ++correct_lab;
                }
            }
        }
        if (roots > 1) ++rep.multi_root_sentences;
        rep.per_sentence.push_back(se);
    }
    rep.uas = rep.scored_tokens ? static_cast<double>(correct) / rep.scored_tokens : 1.0;
    rep.las = rep.scored_tokens ? static_cast<double>(correct_lab) / rep.scored_tokens : 1.0;
    return rep;
}

double order_accuracy(const std::vector<LayerAssignment>& gold,
                      const std::vector<std::vector<int>>& predicted) {
    if (gold.size() != predicted.size())
        throw std::invalid_argument("order_accuracy: corpus size mismatch");
    long total = 0, correct = 0;
    for (std::size_t s = 0; s < gold.size(); ++s) {
        for (std::size_t i = 0; i < gold[s].capped.size(); ++i) {
            ++total;
            int p = std::min(predicted[s][i], kLayerCap);
            if (p == gold[s].capped[i]) ++correct;
        }
    }
    if (total == 0) {
        std::cerr << "warning: order accuracy over empty corpus, reporting 1.0\n";
        return 1.0;
    }
    return static_cast<double>(correct) / total;
}

std::string format_report(const EvalReport& report, bool machine_readable) {
    std::ostringstream os;
    os.precision(2);
    os << std::fixed;
    if (machine_readable) {
        os << "uas=" << 100 * report.uas << "\n";
        os << "las=" << 100 * report.las << "\n";
        os << "order_acc=" << 100 * report.order_acc << "\n";
        os << "scored_tokens=" << report.scored_tokens << "\n";
        os << "excluded_punct=" << report.excluded_punct << "\n";
        os << "total_tokens=" << report.total_tokens << "\n";
        os << "multi_root_sentences=" << report.multi_root_sentences << "\n";
        if (report.tokens_per_sec > 0) os << "tokens_per_sec=" << report.tokens_per_sec << "\n";
    } else {
        os << "UAS        " << 100 * report.uas << "\n";
        os << "LAS        " << 100 * report.las << "\n";
        os << "Order Acc. " << 100 * report.order_acc << "\n";
        os << "tokens: " << report.scored_tokens << " scored, " << report.excluded_punct
           << " punctuation excluded, " << report.total_tokens << " total\n";
        if (report.multi_root_sentences > 0)
            os << "sentences with multiple root children: " << report.multi_root_sentences
               << "\n";
        if (report.tokens_per_sec > 0)
            os << "decode speed: " << report.tokens_per_sec << " tokens/sec\n";
    }
    return os.str();
}

BenchResult benchmark_decode(const Model& model, const std::vector<Sentence>& sentences,
                             DecoderKind kind, int repetitions, int jobs) {
    if (repetitions < 3)
        throw std::invalid_argument("benchmark_decode: repetitions must be >= 3");
    DecodeOptions opts;
    opts.order_on_raw = model.cfg.order_offset_on_raw;
    opts.mst_on_prob = model.cfg.mst_on_prob;
    opts.np_tie_by_confidence = model.cfg.np_tie_by_confidence;

    std::vector<ScoreSet> sets(sentences.size());
    auto score_range = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) sets[i] = score_sentence(sentences[i], model);
    };
    if (jobs <= 1) {
        score_range(0, sentences.size());
    } else {
        std::vector<std::thread> threads;
        std::size_t chunk = (sentences.size() + jobs - 1) / jobs;
        for (int j = 0; j < jobs; ++j) {
            std::size_t lo = j * chunk, hi = std::min(sentences.size(), lo + chunk);
            if (lo < hi) threads.emplace_back(score_range, lo, hi);
        }
        for (auto& t : threads) t.join();
    }

    long total_tokens = 0;
    for (const auto& s : sentences) total_tokens += s.size();

    std::map<int, BenchRow> by_len;
    std::vector<double> times;
    for (int rep = 0; rep < repetitions; ++rep) {
        auto t0 = std::chrono::steady_clock::now();
        for (std::size_t i = 0; i < sentences.size(); ++i) {
            DecodeStats stats;
            decode(kind, sets[i], sentences[i].size(), &stats, opts);
            if (rep == 0) {
                BenchRow& row = by_len[sentences[i].size()];
                row.length = sentences[i].size();
                row.candidates += stats.candidates_evaluated;
                row.sort_comparisons += stats.sort_comparisons;
                row.attachments += stats.attachments;
            }
        }
        auto t1 = std::chrono::steady_clock::now();
        times.push_back(std::chrono::duration<double>(t1 - t0).count());
    }
    std::sort(times.begin(), times.end());
    double median = times[times.size() / 2];

    BenchResult res;
    res.repetitions = repetitions;
    res.median_tokens_per_sec = median > 0 ? total_tokens / median : 0;
    for (auto& [len, row] : by_len) res.rows.push_back(row);
    return res;
}

std::string format_bench(const BenchResult& result) {
    std::ostringstream os;
    os << "length\tcandidates\tsort_cmps\tattachments\n";
    for (const auto& row : result.rows)
        os << row.length << '\t' << row.candidates << '\t' << row.sort_comparisons << '\t'
           << row.attachments << '\n';
    os << "median_tokens_per_sec=" << result.median_tokens_per_sec << "\n";
    os << "repetitions=" << result.repetitions << "\n";
    return os.str();
}

}  // namespace ggparse
