#pragma once

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "ggparse/model.hpp"
#include "ggparse/types.hpp"

namespace ggparse {

enum class ScoreMode { kTrain, kEval };

// Intermediate activations of one forward pass, kept for backpropagation.
struct ForwardCache {
    int n = 0;
    std::vector<int> word_ids, pos_ids;
    std::vector<std::vector<int>> char_ids;      // per word
    std::vector<Eigen::MatrixXd> conv_pre;       // filters x positions, pre-maxpool
    std::vector<std::vector<int>> pool_argmax;   // per word, per filter
    Eigen::MatrixXd X;                           // d_x x (n+1) encoder inputs
    Eigen::MatrixXd drop_mask;                   // d_x x (n+1), 1/(1-p) scaling baked in
    Eigen::MatrixXd h_fwd, h_bwd;                // d_h x (n+1)
    Eigen::VectorXd rec_mask_fwd, rec_mask_bwd;  // variational recurrent dropout
    Eigen::MatrixXd H;                           // 2*d_h x (n+1)
    Eigen::MatrixXd R_head, R_dep, R_ord, R_lhead, R_ldep;  // post-ReLU reps
};

// Contextual encoding: char conv + embeddings -> bidirectional tanh
// recurrence. Row 0 holds the learned root state. rng is only consulted in
// train mode (dropout); eval mode is deterministic.
Eigen::MatrixXd encode(const Sentence& sentence, const Model& model, ScoreMode mode,
                       std::mt19937_64& rng, ForwardCache* cache = nullptr);

ScoreSet score_sentence(const Sentence& sentence, const Model& model, ScoreMode mode,
                        std::mt19937_64& rng, ForwardCache* cache = nullptr);

// Convenience eval-mode entry point.
ScoreSet score_sentence(const Sentence& sentence, const Model& model);

// Predicted layer of a word: argmax over its order logits, ties to the lower
// layer index.
int order_priority(const ScoreSet& scores, int dependent_index);

}  // namespace ggparse
