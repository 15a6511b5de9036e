#include "ggparse/decoder.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ggparse/scorer.hpp"

namespace ggparse {

namespace {

int priority_of(const ScoreSet& ss, int dep, const DecodeOptions& opts) {
    return opts.use_order ? order_priority(ss, dep) : 0;
}

double arc_component(const ScoreSet& ss, int head, int dep, const DecodeOptions& opts) {
    return opts.order_on_raw ? ss.arc(head, dep) : ss.arc_prob(head, dep);
}

}  // namespace

double action_score(const ScoreSet& scores, int head, int dep) {
    if (dep <= 0 || dep > scores.n || head < 0 || head > scores.n || head == dep)
        throw std::invalid_argument("action_score: bad head/dep pair");
    return scores.arc_prob(head, dep) + order_priority(scores, dep);
}

DepTree decode_projective(const ScoreSet& scores, int n, DecodeStats* stats,
                          const DecodeOptions& opts) {
    if (n < 1) throw std::invalid_argument("decode_projective: n must be >= 1");
    std::vector<int> pending;
    pending.reserve(n + 1);
    for (int i = 0; i <= n; ++i) pending.push_back(i);

    // per-word priorities are fixed for the whole decode
    std::vector<int> prio(n + 1, 0);
    for (int d = 1; d <= n; ++d) prio[d] = priority_of(scores, d, opts);

    DepTree tree;
    tree.n = n;
    tree.heads.assign(n, 0);
    for (int step = 0; step < n; ++step) {
        double best = -std::numeric_limits<double>::infinity();
        int best_pos = -1;
        bool best_left = true;  // ATTACH_LEFT: head p_i, dependent p_{i+1}
        for (std::size_t i = 0; i + 1 < pending.size(); ++i) {
            int a = pending[i], b = pending[i + 1];
            // ATTACH_LEFT(i): arc a -> b
            if (b != 0) {
                double s = arc_component(scores, a, b, opts) + prio[b];
                if (stats) ++stats->candidates_evaluated;
                if (s > best) {
                    best = s;
                    best_pos = static_cast<int>(i);
                    best_left = true;
                }
            }
            // ATTACH_RIGHT(i): arc b -> a
            if (a != 0) {
                double s = arc_component(scores, b, a, opts) + prio[a];
                if (stats) ++stats->candidates_evaluated;
                if (s > best) {
                    best = s;
                    best_pos = static_cast<int>(i);
                    best_left = false;
                }
            }
        }
        int head = best_left ? pending[best_pos] : pending[best_pos + 1];
        int dep = best_left ? pending[best_pos + 1] : pending[best_pos];
        tree.heads[dep - 1] = head;
        pending.erase(pending.begin() + best_pos + (best_left ? 1 : 0));
        if (stats) ++stats->attachments;
    }
    return tree;
}

DepTree decode_nonprojective(const ScoreSet& scores, int n, DecodeStats* stats,
                             const DecodeOptions& opts) {
    if (n < 1) throw std::invalid_argument("decode_nonprojective: n must be >= 1");
    std::vector<int> prio(n + 1, 0);
    std::vector<double> conf(n + 1, 0.0);
    for (int d = 1; d <= n; ++d) {
        prio[d] = priority_of(scores, d, opts);
        if (opts.np_tie_by_confidence) conf[d] = scores.order_logits(d - 1, prio[d]);
    }

    std::vector<int> order;
    for (int d = 1; d <= n; ++d) order.push_back(d);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (stats) ++stats->sort_comparisons;
        if (prio[a] != prio[b]) return prio[a] > prio[b];
        if (opts.np_tie_by_confidence && conf[a] != conf[b]) return conf[a] > conf[b];
        return a < b;  // position order within a layer
    });

    std::vector<char> in_pending(n + 1, 1);
    DepTree tree;
    tree.n = n;
    tree.heads.assign(n, 0);
    for (int dep : order) {
        double best = -std::numeric_limits<double>::infinity();
        int best_head = 0;
        // candidate heads are the nodes still pending; attached nodes cannot
        // become heads, which makes the output acyclic by construction
        for (int h = 0; h <= n; ++h) {
            if (h == dep || !in_pending[h]) continue;
            if (stats) ++stats->candidates_evaluated;
            double s = arc_component(scores, h, dep, opts);
            if (s > best) {
                best = s;
                best_head = h;
            }
        }
        tree.heads[dep - 1] = best_head;
        in_pending[dep] = 0;
        if (stats) ++stats->attachments;
    }
    return tree;
}

namespace {

// Chu-Liu/Edmonds by repeated cycle contraction on a dense score matrix.
// Nodes are 0..m-1 with 0 the root; score(h, d), self and into-root edges
// excluded by -inf.
std::vector<int> chu_liu_edmonds(Eigen::MatrixXd scores) {
    const double kNegInf = -std::numeric_limits<double>::infinity();
    const int m = static_cast<int>(scores.rows());
    for (int i = 0; i < m; ++i) scores(i, i) = kNegInf;
    for (int h = 0; h < m; ++h) scores(h, 0) = kNegInf;

    std::vector<int> best_in(m, -1);
    for (int d = 1; d < m; ++d) {
        int bh = 0;
        for (int h = 0; h < m; ++h)
            if (scores(h, d) > scores(bh, d)) bh = h;
        best_in[d] = bh;
    }

    // find a cycle among the best in-edges
    std::vector<int> color(m, 0);
    std::vector<int> cycle;
    for (int start = 1; start < m && cycle.empty(); ++start) {
        if (color[start]) continue;
        int w = start;
        std::vector<int> path;
        while (w != 0 && color[w] == 0) {
            color[w] = 1;
            path.push_back(w);
            w = best_in[w];
        }
        if (w != 0 && color[w] == 1) {
            auto it = std::find(path.begin(), path.end(), w);
            cycle.assign(it, path.end());
        }
        for (int p : path) color[p] = 2;
    }
    if (cycle.empty()) return best_in;

    std::vector<char> in_cycle(m, 0);
    for (int v : cycle) in_cycle[v] = 1;
    double cycle_score = 0;
    for (int v : cycle) cycle_score += scores(best_in[v], v);

    // contract the cycle into node c; map the remaining nodes densely
    std::vector<int> to_new(m, -1);
    int next = 0;
    for (int v = 0; v < m; ++v)
        if (!in_cycle[v]) to_new[v] = next++;
    const int c = next;
    const int m2 = next + 1;

    Eigen::MatrixXd s2 = Eigen::MatrixXd::Constant(m2, m2, kNegInf);
    // remember which original edge realizes each contracted edge
    std::vector<int> enter_head(m2, -1), enter_dep(m2, -1);  // edges into c
    std::vector<int> out_edge_src(m2, -1);  // cycle node realizing edge c -> d

    for (int h = 0; h < m; ++h) {
        for (int d = 1; d < m; ++d) {
            if (scores(h, d) == kNegInf) continue;
            if (!in_cycle[h] && !in_cycle[d]) {
                int nh = to_new[h], nd = to_new[d];
                if (scores(h, d) > s2(nh, nd)) s2(nh, nd) = scores(h, d);
            } else if (!in_cycle[h] && in_cycle[d]) {
                // entering the cycle: break the cycle edge into d
                double w = scores(h, d) - scores(best_in[d], d) + cycle_score;
                int nh = to_new[h];
                if (w > s2(nh, c)) {
                    s2(nh, c) = w;
                    enter_head[nh] = h;
                    enter_dep[nh] = d;
                }
            } else if (in_cycle[h] && !in_cycle[d]) {
                int nd = to_new[d];
                if (scores(h, d) > s2(c, nd)) {
                    s2(c, nd) = scores(h, d);
                    out_edge_src[nd] = h;
                }
            }
        }
    }
    // edges between distinct non-cycle nodes must keep their identity: since
    // the graph is dense and simple, s2(nh, nd) above is exactly scores(h, d)

    std::vector<int> sub = chu_liu_edmonds(s2);

    std::vector<int> heads(m, -1);
    for (int v : cycle) heads[v] = best_in[v];
    // resolve the contracted node's in-edge: breaks one cycle edge
    int centry = sub[c];
    int real_h = (centry == c) ? -1 : enter_head[centry];
    int real_d = (centry == c) ? -1 : enter_dep[centry];
    if (real_h >= 0) heads[real_d] = real_h;

    for (int nd = 1; nd < m2; ++nd) {
        if (nd == c) continue;
        // recover the original dependent index
        int d = -1;
        for (int v = 0; v < m; ++v)
            if (to_new[v] == nd) { d = v; break; }
        int nh = sub[nd];
        if (nh == c) {
            heads[d] = out_edge_src[nd];
        } else {
            for (int v = 0; v < m; ++v)
                if (to_new[v] == nh) { heads[d] = v; break; }
        }
    }
    return heads;
}

}  // namespace

DepTree decode_mst(const ScoreSet& scores, int n, DecodeStats* stats,
                   const DecodeOptions& opts) {
    if (n < 1) throw std::invalid_argument("decode_mst: n must be >= 1");
    const Eigen::MatrixXd& s = opts.mst_on_prob ? scores.arc_prob : scores.arc;
    std::vector<int> heads = chu_liu_edmonds(s);
    DepTree tree;
    tree.n = n;
    tree.heads.assign(heads.begin() + 1, heads.end());
    if (stats) stats->attachments += n;
    return tree;
}

DepTree decode(DecoderKind kind, const ScoreSet& scores, int n, DecodeStats* stats,
               const DecodeOptions& opts) {
    switch (kind) {
        case DecoderKind::kGreedyProjective:
            return decode_projective(scores, n, stats, opts);
        case DecoderKind::kGreedyNonProjective:
            return decode_nonprojective(scores, n, stats, opts);
        case DecoderKind::kMst:
            return decode_mst(scores, n, stats, opts);
    }
    throw std::logic_error("unknown decoder kind");
}

void assign_labels(const ScoreSet& scores, DepTree& tree,
                   const std::vector<std::string>& label_names) {
    if (!scores.has_labels()) return;
    const int L = scores.num_labels();
    tree.labels.resize(tree.n);
    for (int d = 1; d <= tree.n; ++d) {
        const Eigen::MatrixXd& M = scores.label[d - 1];
        int h = tree.heads[d - 1];
        int best = 0;
        for (int r = 1; r < L; ++r)
            if (M(h, r) > M(h, best)) best = r;
        tree.labels[d - 1] =
            best < static_cast<int>(label_names.size()) ? label_names[best] : "_";
    }
}

}  // namespace ggparse
