#pragma once

#include <cstdint>

#include "ggparse/types.hpp"

namespace ggparse {

enum class DecoderKind { kGreedyProjective, kGreedyNonProjective, kMst };

struct DecodeOptions {
    bool use_order = true;           // zeroed for the arc-only ablation
    bool order_on_raw = false;       // add layer offset to raw arc score instead of prob
    bool mst_on_prob = false;
    bool np_tie_by_confidence = false;
};

struct DecodeStats {
    std::int64_t candidates_evaluated = 0;
    std::int64_t sort_comparisons = 0;
    std::int64_t attachments = 0;
};

// s_final for attaching dep under head: arc probability plus the dependent's
// predicted layer.
double action_score(const ScoreSet& scores, int head, int dep);

// Easy-first style greedy decode over adjacent pending pairs; exactly n
// attachments, output is always a valid projective tree.
DepTree decode_projective(const ScoreSet& scores, int n, DecodeStats* stats = nullptr,
                          const DecodeOptions& opts = {});

// Two-step decode: sort words by predicted layer (descending, position order
// within a layer), then give each its best pending head by arc probability.
DepTree decode_nonprojective(const ScoreSet& scores, int n, DecodeStats* stats = nullptr,
                             const DecodeOptions& opts = {});

// Chu-Liu/Edmonds maximum spanning arborescence over raw arc scores.
DepTree decode_mst(const ScoreSet& scores, int n, DecodeStats* stats = nullptr,
                   const DecodeOptions& opts = {});

DepTree decode(DecoderKind kind, const ScoreSet& scores, int n,
               DecodeStats* stats = nullptr, const DecodeOptions& opts = {});

// label(d) = argmax over label[head(d)][d][.], ties to the lowest id.
void assign_labels(const ScoreSet& scores, DepTree& tree,
                   const std::vector<std::string>& label_names);

}  // namespace ggparse
