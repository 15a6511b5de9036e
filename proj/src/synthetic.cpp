#include "ggparse/synthetic.hpp"

#include <string>

#include "ggparse/tree.hpp"

namespace ggparse {

Sentence synthetic_sentence(const DepTree& tree, int id, std::mt19937_64& rng) {
    const int n = tree.n;
    std::vector<bool> has_child(n + 1, false);
    for (int d = 1; d <= n; ++d) has_child[tree.heads[d - 1]] = true;
    std::uniform_int_distribution<int> word(0, 59);
    Sentence s;
    s.source_id = "synthetic-" + std::to_string(id);
    for (int i = 1; i <= n; ++i) {
        Token t;
        t.index = i;
        t.form = "w" + std::to_string(word(rng));
        t.lemma = "_";
        t.upos = has_child[i] ? "V" : "N";
        t.xpos = "_";
        t.feats = "_";
        t.gold_head = tree.heads[i - 1];
        int h = tree.heads[i - 1];
        t.gold_label = h == 0 ? "root" : (i < h ? "left" : "right");
        t.col9 = "_";
        t.col10 = "_";
        s.tokens.push_back(std::move(t));
    }
    return s;
}

std::vector<Sentence> synthetic_treebank(int count, int min_len, int max_len,
                                         unsigned long long seed, bool projective) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> len(min_len, max_len);
    std::vector<Sentence> out;
    for (int i = 0; i < count; ++i) {
        int n = len(rng);
        DepTree t = projective ? random_projective_tree(n, rng) : random_tree(n, rng);
        out.push_back(synthetic_sentence(t, i, rng));
    }
    return out;
}

}  // namespace ggparse
