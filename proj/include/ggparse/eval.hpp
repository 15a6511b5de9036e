#pragma once

#include <string>
#include <vector>

#include "ggparse/conll.hpp"
#include "ggparse/decoder.hpp"
#include "ggparse/model.hpp"
#include "ggparse/types.hpp"

namespace ggparse {

struct SentenceEval {
    std::string source_id;
    int correct_heads = 0, correct_labeled = 0, scored = 0, excluded = 0;
};

struct EvalReport {
    double uas = 0, las = 0, order_acc = 0;
    long scored_tokens = 0, excluded_punct = 0, total_tokens = 0;
    long multi_root_sentences = 0;  // filled when strict-root reporting is on
    std::vector<SentenceEval> per_sentence;
    double decode_seconds = 0;
    double tokens_per_sec = 0;
};

// UAS/LAS over non-punctuation tokens; punctuation per the given convention.
EvalReport attachment_scores(const std::vector<Sentence>& gold,
                             const std::vector<DepTree>& pred,
                             PunctConvention convention);

// Fraction of words (punctuation included) whose predicted capped layer
// matches the gold capped layer. Empty corpus counts as 1.0.
double order_accuracy(const std::vector<LayerAssignment>& gold,
                      const std::vector<std::vector<int>>& predicted);

std::string format_report(const EvalReport& report, bool machine_readable);

struct BenchRow {
    int length = 0;
    std::int64_t candidates = 0;
    std::int64_t sort_comparisons = 0;
    std::int64_t attachments = 0;
};

struct BenchResult {
    std::vector<BenchRow> rows;       // aggregated per sentence length
    double median_tokens_per_sec = 0;
    int repetitions = 0;
};

// Scores once, then decodes `repetitions` times; reports the median
// tokens/sec and per-length operation counts for the scaling checks.
BenchResult benchmark_decode(const Model& model, const std::vector<Sentence>& sentences,
                             DecoderKind kind, int repetitions, int jobs = 1);

std::string format_bench(const BenchResult& result);

}  // namespace ggparse
