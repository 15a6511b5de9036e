#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ggparse {

// One syntactic word. Indices are 1-based within the sentence; head 0 is the
// artificial root.
struct Token {
    int index = 0;
    std::string form;
    std::string lemma;
    std::string upos;
    std::string xpos;
    std::string feats;
    int gold_head = 0;
    std::string gold_label;
    std::string col9;   // PHEAD / DEPS, kept verbatim for round-trip
    std::string col10;  // PDEPREL / MISC
};

struct Sentence {
    std::vector<Token> tokens;
    std::vector<std::string> comments;  // '#' lines, preserved verbatim
    std::string source_id;

    int size() const { return static_cast<int>(tokens.size()); }
};

// A dependency tree over n words. heads[d-1] is the head of word d (0 = root).
// labels may be empty for unlabeled trees.
struct DepTree {
    int n = 0;
    std::vector<int> heads;
    std::vector<std::string> labels;

    DepTree() = default;
    explicit DepTree(std::vector<int> h) : n(static_cast<int>(h.size())), heads(std::move(h)) {}

    int head_of(int dep) const { return heads[dep - 1]; }
    bool operator==(const DepTree& o) const { return heads == o.heads && labels == o.labels; }
};

inline constexpr int kLayerCap = 32;
inline constexpr int kOrderClasses = kLayerCap + 1;  // classes 0..32

// Per-word tree depth, capped at kLayerCap for training targets.
struct LayerAssignment {
    std::vector<int> layers;         // true depth, layers[d-1] for word d
    std::vector<int> capped;         // min(layer, 32)

    int layer_of(int dep) const { return layers[dep - 1]; }
    int target_of(int dep) const { return capped[dep - 1]; }
};

// Dense scores for one sentence. arc is (n+1)x(n+1): entry (h, d) scores head
// h over dependent d; row/col 0 is root, column 0 is never a dependent.
// order_logits is n x 33, row d-1 for word d. label[d-1] is (n+1) x L.
struct ScoreSet {
    int n = 0;
    Eigen::MatrixXd arc;
    Eigen::MatrixXd arc_prob;
    Eigen::MatrixXd order_logits;
    std::vector<Eigen::MatrixXd> label;

    bool has_labels() const { return !label.empty(); }
    int num_labels() const { return label.empty() ? 0 : static_cast<int>(label[0].cols()); }
};

}  // namespace ggparse
