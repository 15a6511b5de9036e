#include "ggparse/scorer.hpp"

#include <cmath>
#include <stdexcept>

namespace ggparse {

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::vector<int> char_ids_of(const std::string& form, const Vocab& vocab) {
    std::vector<int> ids;
    ids.reserve(form.size());
    for (char c : form) ids.push_back(vocab.char_id(std::string(1, c)));
    return ids;
}

// char conv (window 3, zero padding 1) -> ReLU -> max pool
Eigen::VectorXd char_features(const std::vector<int>& chars, const ParamSet& p, int d_c,
                              Eigen::MatrixXd* pre_out, std::vector<int>* argmax_out) {
    const int len = static_cast<int>(chars.size());
    const int filters = static_cast<int>(p.W_conv.rows());
    Eigen::MatrixXd pre(filters, len);
    for (int j = 0; j < len; ++j) {
        Eigen::VectorXd window = Eigen::VectorXd::Zero(3 * d_c);
        for (int k = -1; k <= 1; ++k) {
            int idx = j + k;
            if (idx < 0 || idx >= len) continue;  // zero (PAD) context
            window.segment((k + 1) * d_c, d_c) = p.E_char.row(chars[idx]).transpose();
        }
        pre.col(j) = p.W_conv * window + p.b_conv;
    }
    Eigen::VectorXd pooled = Eigen::VectorXd::Zero(filters);
    std::vector<int> argmax(filters, -1);
    for (int f = 0; f < filters; ++f) {
        for (int j = 0; j < len; ++j) {
            double v = std::max(0.0, pre(f, j));
            if (v > pooled(f)) {
                pooled(f) = v;
                argmax[f] = j;
            }
        }
    }
    if (pre_out) *pre_out = std::move(pre);
    if (argmax_out) *argmax_out = std::move(argmax);
    return pooled;
}

}  // namespace

Eigen::MatrixXd encode(const Sentence& sentence, const Model& model, ScoreMode mode,
                       std::mt19937_64& rng, ForwardCache* cache) {
    const int n = sentence.size();
    if (n == 0) throw std::invalid_argument("encode: empty sentence");
    const Config& cfg = model.cfg;
    const ParamSet& p = model.params;
    const int dx = model.input_dim();
    const int dh = cfg.hidden_dim;

    ForwardCache local;
    ForwardCache& fc = cache ? *cache : local;
    fc = ForwardCache{};
    fc.n = n;

    fc.X = Eigen::MatrixXd::Zero(dx, n + 1);
    fc.X.col(0) = p.root_embed.col(0);
    fc.drop_mask = Eigen::MatrixXd::Ones(dx, n + 1);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const bool training = mode == ScoreMode::kTrain;
    const double ep = cfg.embed_dropout;
    const double keep_scale = ep > 0 ? 1.0 / (1.0 - ep) : 1.0;

    fc.word_ids.resize(n + 1);
    fc.pos_ids.resize(n + 1);
    fc.char_ids.resize(n + 1);
    fc.conv_pre.resize(n + 1);
    fc.pool_argmax.resize(n + 1);
    for (int i = 1; i <= n; ++i) {
        const Token& tok = sentence.tokens[i - 1];
        fc.word_ids[i] = model.vocab.word_id(tok.form);
        fc.pos_ids[i] = model.vocab.pos_id(tok.upos);
        fc.char_ids[i] = char_ids_of(tok.form, model.vocab);
        Eigen::VectorXd cfeat = char_features(fc.char_ids[i], p, cfg.char_dim,
                                              &fc.conv_pre[i], &fc.pool_argmax[i]);
        int off = 0;
        fc.X.col(i).segment(off, cfg.word_dim) = p.E_word.row(fc.word_ids[i]).transpose();
        off += cfg.word_dim;
        fc.X.col(i).segment(off, cfg.pos_dim) = p.E_pos.row(fc.pos_ids[i]).transpose();
        off += cfg.pos_dim;
        fc.X.col(i).segment(off, cfg.char_filters) = cfeat;
        off += cfg.char_filters;
        if (cfg.extern_dim > 0) {
            auto it = model.extern_embed.find(tok.form);
            if (it != model.extern_embed.end())
                fc.X.col(i).segment(off, cfg.extern_dim) = it->second;
        }
        if (training && ep > 0) {
            // whole-vector dropout, independently per embedding type
            double mw = uni(rng) < ep ? 0.0 : keep_scale;
            double mp = uni(rng) < ep ? 0.0 : keep_scale;
            double mc = uni(rng) < ep ? 0.0 : keep_scale;
            fc.drop_mask.col(i).segment(0, cfg.word_dim).setConstant(mw);
            fc.drop_mask.col(i).segment(cfg.word_dim, cfg.pos_dim).setConstant(mp);
            fc.drop_mask.col(i)
                .segment(cfg.word_dim + cfg.pos_dim, cfg.char_filters)
                .setConstant(mc);
        }
    }
    fc.X = fc.X.cwiseProduct(fc.drop_mask);

    fc.rec_mask_fwd = Eigen::VectorXd::Ones(dh);
    fc.rec_mask_bwd = Eigen::VectorXd::Ones(dh);
    if (training && cfg.recurrent_dropout > 0) {
        const double rp = cfg.recurrent_dropout;
        const double rs = 1.0 / (1.0 - rp);
        for (int k = 0; k < dh; ++k) {
            fc.rec_mask_fwd(k) = uni(rng) < rp ? 0.0 : rs;
            fc.rec_mask_bwd(k) = uni(rng) < rp ? 0.0 : rs;
        }
    }

    fc.h_fwd = Eigen::MatrixXd::Zero(dh, n + 1);
    fc.h_bwd = Eigen::MatrixXd::Zero(dh, n + 1);
    Eigen::VectorXd h = Eigen::VectorXd::Zero(dh);
    for (int t = 0; t <= n; ++t) {
        h = (p.W_fwd * fc.X.col(t) + p.U_fwd * h.cwiseProduct(fc.rec_mask_fwd) +
             p.b_fwd.col(0))
                .array()
                .tanh();
        fc.h_fwd.col(t) = h;
    }
    h.setZero();
    for (int t = n; t >= 0; --t) {
        h = (p.W_bwd * fc.X.col(t) + p.U_bwd * h.cwiseProduct(fc.rec_mask_bwd) +
             p.b_bwd.col(0))
                .array()
                .tanh();
        fc.h_bwd.col(t) = h;
    }
    fc.H = Eigen::MatrixXd(2 * dh, n + 1);
    fc.H.topRows(dh) = fc.h_fwd;
    fc.H.bottomRows(dh) = fc.h_bwd;
    return fc.H;
}

ScoreSet score_sentence(const Sentence& sentence, const Model& model, ScoreMode mode,
                        std::mt19937_64& rng, ForwardCache* cache) {
    ForwardCache local;
    ForwardCache& fc = cache ? *cache : local;
    encode(sentence, model, mode, rng, &fc);
    const int n = fc.n;
    const ParamSet& p = model.params;

    auto relu_mlp = [&](const Eigen::MatrixXd& W,
                        const Eigen::MatrixXd& b) -> Eigen::MatrixXd {
        Eigen::MatrixXd r = (W * fc.H).colwise() + b.col(0);
        return r.cwiseMax(0.0);
    };
    fc.R_head = relu_mlp(p.W_head, p.b_head);
    fc.R_dep = relu_mlp(p.W_dep, p.b_dep);
    fc.R_ord = relu_mlp(p.W_ord, p.b_ord);
    fc.R_lhead = relu_mlp(p.W_lhead, p.b_lhead);
    fc.R_ldep = relu_mlp(p.W_ldep, p.b_ldep);

    ScoreSet ss;
    ss.n = n;
    ss.arc = fc.R_head.transpose() * p.W_arc * fc.R_dep;
    Eigen::VectorXd uh = fc.R_head.transpose() * p.U_arc.col(0);
    Eigen::VectorXd vd = fc.R_dep.transpose() * p.V_arc.col(0);
    ss.arc.colwise() += uh;
    ss.arc.rowwise() += vd.transpose();
    ss.arc.array() += p.b_arc(0, 0);
    ss.arc_prob = ss.arc.unaryExpr([](double x) { return sigmoid(x); });

    ss.order_logits = Eigen::MatrixXd(n, kOrderClasses);
    for (int d = 1; d <= n; ++d)
        ss.order_logits.row(d - 1) =
            (p.W_order * fc.R_ord.col(d) + p.b_order.col(0)).transpose();

    const int L = static_cast<int>(p.W_lab.size());
    if (model.vocab.num_labels() > 0) {
        std::vector<Eigen::MatrixXd> A(L);  // (n+1) x d_lab per label
        for (int r = 0; r < L; ++r) A[r] = fc.R_lhead.transpose() * p.W_lab[r];
        Eigen::MatrixXd Uh = fc.R_lhead.transpose() * p.U_lab.transpose();  // (n+1) x L
        ss.label.assign(n, Eigen::MatrixXd(n + 1, L));
        for (int d = 1; d <= n; ++d) {
            Eigen::VectorXd ld = fc.R_ldep.col(d);
            Eigen::VectorXd vl = p.V_lab * ld + p.b_lab.col(0);  // L
            Eigen::MatrixXd& M = ss.label[d - 1];
            for (int r = 0; r < L; ++r) M.col(r) = A[r] * ld;
            M += Uh;
            M.rowwise() += vl.transpose();
        }
    }
    return ss;
}

ScoreSet score_sentence(const Sentence& sentence, const Model& model) {
    std::mt19937_64 rng(0);
    return score_sentence(sentence, model, ScoreMode::kEval, rng, nullptr);
}

int order_priority(const ScoreSet& scores, int dependent_index) {
    const auto& row = scores.order_logits.row(dependent_index - 1);
    int best = 0;
    for (int k = 1; k < kOrderClasses; ++k)
        if (row(k) > row(best)) best = k;
    return best;
}

}  // namespace ggparse
