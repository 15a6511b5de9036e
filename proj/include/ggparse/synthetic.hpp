#pragma once

#include <random>
#include <vector>

#include "ggparse/types.hpp"

namespace ggparse {

// Synthetic sentences with gold trees, for fixtures and decoder benchmarks.
// Labels follow the attachment direction (root/left/right), POS marks leaves
// vs. internal nodes.
Sentence synthetic_sentence(const DepTree& tree, int id, std::mt19937_64& rng);

std::vector<Sentence> synthetic_treebank(int count, int min_len, int max_len,
                                         unsigned long long seed, bool projective);

}  // namespace ggparse
