#include "ggparse/tree.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ggparse {

TreeValidity validate_tree(const std::vector<int>& heads) {
    const int n = static_cast<int>(heads.size());
    if (n < 1) return {false, "empty"};
    for (int d = 1; d <= n; ++d) {
        int h = heads[d - 1];
        if (h < 0 || h > n) return {false, "out-of-range"};
        if (h == d) return {false, "self-loop"};
    }
    // walk each word to root; revisiting a node within one walk is a cycle
    std::vector<int> color(n + 1, 0);  // 0 unseen, 1 on current path, 2 done
    color[0] = 2;
    for (int start = 1; start <= n; ++start) {
        if (color[start] == 2) continue;
        int w = start;
        std::vector<int> path;
        while (color[w] == 0) {
            color[w] = 1;
            path.push_back(w);
            w = heads[w - 1];
        }
        if (color[w] == 1) return {false, "cycle"};
        for (int p : path) color[p] = 2;
    }
    return {true, ""};
}

LayerAssignment compute_layers(const DepTree& tree) {
    auto v = validate_tree(tree);
    if (!v.valid) throw std::invalid_argument("compute_layers: invalid tree: " + v.reason);
    const int n = tree.n;
    LayerAssignment la;
    la.layers.assign(n, -1);
    for (int d = 1; d <= n; ++d) {
        if (la.layers[d - 1] >= 0) continue;
        std::vector<int> path;
        int w = d;
        while (w != 0 && la.layers[w - 1] < 0) {
            path.push_back(w);
            w = tree.heads[w - 1];
        }
        int base = (w == 0) ? 0 : la.layers[w - 1];
        for (auto it = path.rbegin(); it != path.rend(); ++it)
            la.layers[*it - 1] = ++base;
    }
    la.capped.resize(n);
    for (int i = 0; i < n; ++i) la.capped[i] = std::min(la.layers[i], kLayerCap);
    return la;
}

bool is_projective(const DepTree& tree) {
    const int n = tree.n;
    for (int d1 = 1; d1 <= n; ++d1) {
        int a = std::min(d1, tree.heads[d1 - 1]);
        int b = std::max(d1, tree.heads[d1 - 1]);
        for (int d2 = d1 + 1; d2 <= n; ++d2) {
            int c = std::min(d2, tree.heads[d2 - 1]);
            int e = std::max(d2, tree.heads[d2 - 1]);
            if ((a < c && c < b && b < e) || (c < a && a < e && e < b)) return false;
        }
    }
    return true;
}

void enumerate_arborescences(int n, const std::function<void(const DepTree&)>& visit) {
    if (n < 1 || n > 7)
        throw std::invalid_argument("enumerate_arborescences: n must be in [1,7]");
    std::vector<int> heads(n, 0);
    while (true) {
        bool ok = true;
        for (int d = 1; d <= n && ok; ++d)
            if (heads[d - 1] == d) ok = false;
        if (ok && validate_tree(heads).valid) visit(DepTree(heads));
        int i = 0;
        for (; i < n; ++i) {
            if (++heads[i] <= n) break;
            heads[i] = 0;
        }
        if (i == n) break;
    }
}

long long count_arborescences(int n) {
    long long c = 0;
    enumerate_arborescences(n, [&](const DepTree&) { ++c; });
    return c;
}

ScoreSet oracle_scores(const DepTree& tree, int num_labels,
                       const std::vector<int>& gold_label_ids) {
    auto v = validate_tree(tree);
    if (!v.valid) throw std::invalid_argument("oracle_scores: invalid tree: " + v.reason);
    const int n = tree.n;
    const double kHigh = 1000.0;  // sigmoid(+-1000) is exactly 1.0 / 0.0 in double
    ScoreSet ss;
    ss.n = n;
    ss.arc = Eigen::MatrixXd::Constant(n + 1, n + 1, -kHigh);
    for (int d = 1; d <= n; ++d) ss.arc(tree.heads[d - 1], d) = kHigh;
    ss.arc_prob = ss.arc.unaryExpr([](double x) { return 1.0 / (1.0 + std::exp(-x)); });
    LayerAssignment la = compute_layers(tree);
    ss.order_logits = Eigen::MatrixXd::Zero(n, kOrderClasses);
    for (int d = 1; d <= n; ++d) ss.order_logits(d - 1, la.target_of(d)) = 1.0;
    if (num_labels > 0) {
        ss.label.assign(n, Eigen::MatrixXd::Zero(n + 1, num_labels));
        for (int d = 1; d <= n; ++d) {
            int gold = gold_label_ids.empty() ? 0 : gold_label_ids[d - 1];
            ss.label[d - 1](tree.heads[d - 1], gold) = 1.0;
        }
    }
    return ss;
}

namespace {

void sample_span(int lo, int hi, int head, std::vector<int>& heads, std::mt19937_64& rng) {
    if (lo > hi) return;
    std::uniform_int_distribution<int> pick(lo, hi);
    int r = pick(rng);
    heads[r - 1] = head;
    sample_span(lo, r - 1, r, heads, rng);
    sample_span(r + 1, hi, r, heads, rng);
}

}  // namespace

DepTree random_projective_tree(int n, std::mt19937_64& rng) {
    std::vector<int> heads(n, 0);
    sample_span(1, n, 0, heads, rng);
    return DepTree(heads);
}

DepTree random_tree(int n, std::mt19937_64& rng) {
    // random recursive tree over a shuffled node order: arbitrary shape,
    // frequently non-projective for n >= 4
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i + 1;
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<int> heads(n, 0);
    for (int i = 1; i < n; ++i) {
        std::uniform_int_distribution<int> pick(0, i - 1);
        heads[order[i] - 1] = order[pick(rng)];
    }
    if (n > 0) heads[order[0] - 1] = 0;
    return DepTree(heads);
}

}  // namespace ggparse
