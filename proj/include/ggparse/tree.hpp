#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "ggparse/types.hpp"

namespace ggparse {

struct TreeValidity {
    bool valid = false;
    std::string reason;  // "", "empty", "out-of-range", "self-loop", "cycle"
};

// Valid iff heads describe a single-rooted arborescence over {0..n} (root may
// have several children).
TreeValidity validate_tree(const std::vector<int>& heads);
inline TreeValidity validate_tree(const DepTree& t) { return validate_tree(t.heads); }

// Depth below root per word; training targets capped at 32.
LayerAssignment compute_layers(const DepTree& tree);

// True iff no two arcs cross when drawn above the sentence.
bool is_projective(const DepTree& tree);

// Enumerates every valid head vector over n words (n <= 7) and calls visit.
void enumerate_arborescences(int n, const std::function<void(const DepTree&)>& visit);
long long count_arborescences(int n);

// Synthetic ScoreSet from a gold tree: gold arcs get probability exactly 1
// (raw +1000), everything else exactly 0; order logits one-hot at the capped
// gold layer;
// label scores one-hot when num_labels > 0. Greedy decoders reconstruct the
// gold tree exactly from these scores.
ScoreSet oracle_scores(const DepTree& tree, int num_labels = 0,
                       const std::vector<int>& gold_label_ids = {});

// Uniform-ish samplers used by tests and the bench/oracle-check tooling.
DepTree random_projective_tree(int n, std::mt19937_64& rng);
DepTree random_tree(int n, std::mt19937_64& rng);  // arbitrary, may be non-projective

}  // namespace ggparse
