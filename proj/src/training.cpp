#include "ggparse/training.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>

#include "ggparse/eval.hpp"
#include "ggparse/tree.hpp"

namespace ggparse {

namespace {

// log softmax over the valid entries of a column/row; returns the gradient
// (softmax - onehot) in grad and the NLL at the target
double nll_and_grad(const Eigen::VectorXd& logits, const std::vector<int>& valid,
                    int target, Eigen::VectorXd& grad) {
    double mx = -std::numeric_limits<double>::infinity();
    for (int i : valid) mx = std::max(mx, logits(i));
    double z = 0;
    for (int i : valid) z += std::exp(logits(i) - mx);
    double logz = mx + std::log(z);
    grad.setZero(logits.size());
    for (int i : valid) grad(i) = std::exp(logits(i) - logz);
    grad(target) -= 1.0;
    return logz - logits(target);
}

struct SentenceGrads {
    Eigen::MatrixXd G_arc;   // (n+1) x (n+1), diagonal and column 0 zero
    Eigen::MatrixXd G_ord;   // n x 33
    std::vector<Eigen::VectorXd> g_lab;  // per dependent, gradient at the gold head row
};

LossBreakdown loss_and_output_grads(const DepTree& gold, const ScoreSet& ss,
                                    const Vocab* vocab, SentenceGrads* out) {
    auto v = validate_tree(gold);
    if (!v.valid) throw std::invalid_argument("loss: invalid gold tree: " + v.reason);
    const int n = ss.n;
    if (gold.n != n) throw std::invalid_argument("loss: length mismatch");
    LayerAssignment la = compute_layers(gold);

    LossBreakdown lb;
    if (out) {
        out->G_arc = Eigen::MatrixXd::Zero(n + 1, n + 1);
        out->G_ord = Eigen::MatrixXd::Zero(n, kOrderClasses);
        out->g_lab.assign(n, Eigen::VectorXd());
    }
    Eigen::VectorXd grad;
    for (int d = 1; d <= n; ++d) {
        // arc: softmax over heads, self-head masked
        std::vector<int> heads;
        for (int h = 0; h <= n; ++h)
            if (h != d) heads.push_back(h);
        lb.l_arc += nll_and_grad(ss.arc.col(d), heads, gold.heads[d - 1], grad);
        if (out) out->G_arc.col(d) = grad;

        // order: 33 classes, target capped at 32
        std::vector<int> classes(kOrderClasses);
        std::iota(classes.begin(), classes.end(), 0);
        lb.l_order +=
            nll_and_grad(ss.order_logits.row(d - 1).transpose(), classes,
                         la.target_of(d), grad);
        if (out) out->G_ord.row(d - 1) = grad.transpose();

        // rel: label softmax at the gold head
        if (ss.has_labels() && !gold.labels.empty()) {
            const int L = ss.num_labels();
            std::vector<int> ls(L);
            std::iota(ls.begin(), ls.end(), 0);
            int target = vocab ? vocab->label_id(gold.labels[d - 1]) : 0;
            lb.l_rel += nll_and_grad(
                ss.label[d - 1].row(gold.heads[d - 1]).transpose(), ls, target, grad);
            if (out) out->g_lab[d - 1] = grad;
        }
    }
    return lb;
}

// backprop one sentence; adds unscaled gradients into g
void backward(const Model& model, const ForwardCache& fc, const ScoreSet& ss,
              const DepTree& gold, const SentenceGrads& sg, ParamSet& g) {
    const ParamSet& p = model.params;
    const Config& cfg = model.cfg;
    const int n = fc.n;
    const int dh = cfg.hidden_dim;

    const Eigen::MatrixXd& G = sg.G_arc;
    Eigen::VectorXd row_sum = G.rowwise().sum();
    Eigen::VectorXd col_sum = G.colwise().sum().transpose();

    Eigen::MatrixXd dR_head =
        p.W_arc * fc.R_dep * G.transpose() + p.U_arc.col(0) * row_sum.transpose();
    Eigen::MatrixXd dR_dep =
        p.W_arc.transpose() * fc.R_head * G + p.V_arc.col(0) * col_sum.transpose();
    g.W_arc += fc.R_head * G * fc.R_dep.transpose();
    g.U_arc.col(0) += fc.R_head * row_sum;
    g.V_arc.col(0) += fc.R_dep * col_sum;
    g.b_arc(0, 0) += G.sum();

    Eigen::MatrixXd Ro = fc.R_ord.rightCols(n);  // columns 1..n
    g.W_order += sg.G_ord.transpose() * Ro.transpose();
    g.b_order.col(0) += sg.G_ord.colwise().sum().transpose();
    Eigen::MatrixXd dR_ord = Eigen::MatrixXd::Zero(fc.R_ord.rows(), n + 1);
    dR_ord.rightCols(n) = p.W_order.transpose() * sg.G_ord.transpose();

    Eigen::MatrixXd dR_lhead = Eigen::MatrixXd::Zero(fc.R_lhead.rows(), n + 1);
    Eigen::MatrixXd dR_ldep = Eigen::MatrixXd::Zero(fc.R_ldep.rows(), n + 1);
    if (ss.has_labels() && !gold.labels.empty()) {
        const int L = ss.num_labels();
        for (int d = 1; d <= n; ++d) {
            const Eigen::VectorXd& gl = sg.g_lab[d - 1];
            if (gl.size() == 0) continue;
            int h = gold.heads[d - 1];
            Eigen::VectorXd lh = fc.R_lhead.col(h);
            Eigen::VectorXd ld = fc.R_ldep.col(d);
            for (int r = 0; r < L; ++r) {
                if (gl(r) == 0.0) continue;
                g.W_lab[r] += gl(r) * lh * ld.transpose();
                dR_lhead.col(h) += gl(r) * (p.W_lab[r] * ld);
                dR_ldep.col(d) += gl(r) * (p.W_lab[r].transpose() * lh);
            }
            g.U_lab += gl * lh.transpose();
            g.V_lab += gl * ld.transpose();
            g.b_lab.col(0) += gl;
            dR_lhead.col(h) += p.U_lab.transpose() * gl;
            dR_ldep.col(d) += p.V_lab.transpose() * gl;
        }
    }

    // ReLU MLPs
    Eigen::MatrixXd dH = Eigen::MatrixXd::Zero(fc.H.rows(), n + 1);
    auto mlp_back = [&](const Eigen::MatrixXd& R, const Eigen::MatrixXd& dR,
                        const Eigen::MatrixXd& W, Eigen::MatrixXd& gW,
                        Eigen::MatrixXd& gb) {
        Eigen::MatrixXd dpre =
            dR.cwiseProduct((R.array() > 0.0).cast<double>().matrix());
        gW += dpre * fc.H.transpose();
        gb.col(0) += dpre.rowwise().sum();
        dH += W.transpose() * dpre;
    };
    mlp_back(fc.R_head, dR_head, p.W_head, g.W_head, g.b_head);
    mlp_back(fc.R_dep, dR_dep, p.W_dep, g.W_dep, g.b_dep);
    mlp_back(fc.R_ord, dR_ord, p.W_ord, g.W_ord, g.b_ord);
    mlp_back(fc.R_lhead, dR_lhead, p.W_lhead, g.W_lhead, g.b_lhead);
    mlp_back(fc.R_ldep, dR_ldep, p.W_ldep, g.W_ldep, g.b_ldep);

    // bidirectional recurrence, back through time
    Eigen::MatrixXd dX = Eigen::MatrixXd::Zero(fc.X.rows(), n + 1);
    {
        Eigen::VectorXd carry = Eigen::VectorXd::Zero(dh);
        for (int t = n; t >= 0; --t) {
            Eigen::VectorXd dh_t = dH.col(t).head(dh) + carry;
            Eigen::VectorXd da =
                dh_t.cwiseProduct((1.0 - fc.h_fwd.col(t).array().square()).matrix());
            Eigen::VectorXd prev = t > 0 ? Eigen::VectorXd(fc.h_fwd.col(t - 1))
                                         : Eigen::VectorXd(Eigen::VectorXd::Zero(dh));
            g.W_fwd += da * fc.X.col(t).transpose();
            g.U_fwd += da * prev.cwiseProduct(fc.rec_mask_fwd).transpose();
            g.b_fwd.col(0) += da;
            dX.col(t) += p.W_fwd.transpose() * da;
            carry = (p.U_fwd.transpose() * da).cwiseProduct(fc.rec_mask_fwd);
        }
    }
    {
        Eigen::VectorXd carry = Eigen::VectorXd::Zero(dh);
        for (int t = 0; t <= n; ++t) {
            Eigen::VectorXd dh_t = dH.col(t).tail(dh) + carry;
            Eigen::VectorXd da =
                dh_t.cwiseProduct((1.0 - fc.h_bwd.col(t).array().square()).matrix());
            Eigen::VectorXd prev = t < n ? Eigen::VectorXd(fc.h_bwd.col(t + 1))
                                         : Eigen::VectorXd(Eigen::VectorXd::Zero(dh));
            g.W_bwd += da * fc.X.col(t).transpose();
            g.U_bwd += da * prev.cwiseProduct(fc.rec_mask_bwd).transpose();
            g.b_bwd.col(0) += da;
            dX.col(t) += p.W_bwd.transpose() * da;
            carry = (p.U_bwd.transpose() * da).cwiseProduct(fc.rec_mask_bwd);
        }
    }

    // through the dropout mask into embeddings and the char conv
    Eigen::MatrixXd dXm = dX.cwiseProduct(fc.drop_mask);
    g.root_embed.col(0) += dXm.col(0);
    const int dw = cfg.word_dim, dp = cfg.pos_dim, dc = cfg.char_dim;
    for (int i = 1; i <= n; ++i) {
        g.E_word.row(fc.word_ids[i]) += dXm.col(i).head(dw).transpose();
        g.E_pos.row(fc.pos_ids[i]) += dXm.col(i).segment(dw, dp).transpose();
        Eigen::VectorXd gp = dXm.col(i).segment(dw + dp, cfg.char_filters);
        const auto& chars = fc.char_ids[i];
        const int len = static_cast<int>(chars.size());
        for (int f = 0; f < cfg.char_filters; ++f) {
            int j = fc.pool_argmax[i][f];
            if (j < 0 || gp(f) == 0.0) continue;
            double dpre = gp(f);
            g.b_conv(f, 0) += dpre;
            for (int k = -1; k <= 1; ++k) {
                int idx = j + k;
                if (idx < 0 || idx >= len) continue;
                g.W_conv.row(f).segment((k + 1) * dc, dc) +=
                    dpre * p.E_char.row(chars[idx]);
                g.E_char.row(chars[idx]) +=
                    dpre * p.W_conv.row(f).segment((k + 1) * dc, dc);
            }
        }
    }
}

}  // namespace

LossBreakdown loss(const Sentence& sentence, const DepTree& gold, const ScoreSet& scores,
                   const Vocab* vocab) {
    (void)sentence;
    return loss_and_output_grads(gold, scores, vocab, nullptr);
}

LossBreakdown gradients(const std::vector<const Sentence*>& batch, const Model& model,
                        ParamSet& grads, ScoreMode mode, std::mt19937_64& rng) {
    if (batch.empty()) throw std::invalid_argument("gradients: empty batch");
    grads = model.params.zeros_like();
    LossBreakdown total;
    for (const Sentence* sent : batch) {
        ForwardCache fc;
        ScoreSet ss = score_sentence(*sent, model, mode, rng, &fc);
        DepTree gold = gold_tree(*sent);
        SentenceGrads sg;
        LossBreakdown lb = loss_and_output_grads(gold, ss, &model.vocab, &sg);
        if (!std::isfinite(lb.total()))
            throw std::runtime_error("non-finite loss on sentence " + sent->source_id);
        total.l_arc += lb.l_arc;
        total.l_rel += lb.l_rel;
        total.l_order += lb.l_order;
        backward(model, fc, ss, gold, sg, grads);
    }
    const double inv = 1.0 / static_cast<double>(batch.size());
    grads.scale(inv);
    total.l_arc *= inv;
    total.l_rel *= inv;
    total.l_order *= inv;
    return total;
}

OptimizerState init_optimizer(const Model& model) {
    OptimizerState opt;
    opt.m = model.params.zeros_like();
    opt.v = model.params.zeros_like();
    opt.lr = model.cfg.learning_rate;
    return opt;
}

void step(OptimizerState& opt, Model& model, ParamSet& grads) {
    const Config& cfg = model.cfg;
    double norm = grads.global_norm();
    if (norm > cfg.clip_norm && norm > 0) grads.scale(cfg.clip_norm / norm);
    ++opt.step_count;
    const double t = static_cast<double>(opt.step_count);
    const double bc1 = 1.0 - std::pow(cfg.beta1, t);
    const double bc2 = 1.0 - std::pow(cfg.beta2, t);

    std::vector<Eigen::MatrixXd*> gs, ms, vs, ps;
    grads.visit([&](const std::string&, Eigen::MatrixXd& m) { gs.push_back(&m); });
    opt.m.visit([&](const std::string&, Eigen::MatrixXd& m) { ms.push_back(&m); });
    opt.v.visit([&](const std::string&, Eigen::MatrixXd& m) { vs.push_back(&m); });
    model.params.visit([&](const std::string&, Eigen::MatrixXd& m) { ps.push_back(&m); });
    if (gs.size() != ps.size()) throw std::invalid_argument("step: shape mismatch");
    for (std::size_t i = 0; i < ps.size(); ++i) {
        if (gs[i]->rows() != ps[i]->rows() || gs[i]->cols() != ps[i]->cols())
            throw std::invalid_argument("step: shape mismatch");
        Eigen::MatrixXd& m = *ms[i];
        Eigen::MatrixXd& v = *vs[i];
        m = cfg.beta1 * m + (1.0 - cfg.beta1) * *gs[i];
        v = cfg.beta2 * v.array().matrix() +
            (1.0 - cfg.beta2) * gs[i]->array().square().matrix();
        Eigen::ArrayXXd mhat = m.array() / bc1;
        Eigen::ArrayXXd vhat = v.array() / bc2;
        ps[i]->array() -= opt.lr * mhat / (vhat.sqrt() + cfg.adam_eps);
    }
}

namespace {

struct DevScores {
    double uas = 0, las = 0, order_acc = 0;
};

DevScores evaluate_dev(const Model& model, const std::vector<Sentence>& dev,
                       DecoderKind kind) {
    DecodeOptions opts;
    opts.order_on_raw = model.cfg.order_offset_on_raw;
    opts.mst_on_prob = model.cfg.mst_on_prob;
    opts.np_tie_by_confidence = model.cfg.np_tie_by_confidence;
    std::vector<DepTree> preds;
    std::vector<LayerAssignment> gold_layers;
    std::vector<std::vector<int>> pred_layers;
    for (const Sentence& s : dev) {
        ScoreSet ss = score_sentence(s, model);
        DepTree t = decode(kind, ss, s.size(), nullptr, opts);
        assign_labels(ss, t, model.vocab.label_names);
        preds.push_back(std::move(t));
        gold_layers.push_back(compute_layers(gold_tree(s)));
        std::vector<int> pl;
        for (int d = 1; d <= s.size(); ++d) pl.push_back(order_priority(ss, d));
        pred_layers.push_back(std::move(pl));
    }
    EvalReport rep = attachment_scores(dev, preds, PunctConvention::kUd);
    DevScores out;
    out.uas = rep.uas;
    out.las = rep.las;
    out.order_acc = order_accuracy(gold_layers, pred_layers);
    return out;
}

}  // namespace

TrainResult train(const Config& cfg, const std::vector<Sentence>& train_set,
                  const std::vector<Sentence>& dev_set, DecoderKind dev_decoder,
                  std::ostream* log_stream) {
    if (train_set.empty()) throw std::invalid_argument("train: empty training set");
    std::mt19937_64 rng(cfg.seed);
    Vocab vocab = build_vocab(train_set, cfg.min_word_freq);
    Model model = init_model(cfg, vocab, rng);
    if (!cfg.extern_embed_file.empty())
        load_extern_embeddings(model, cfg.extern_embed_file);
    OptimizerState opt = init_optimizer(model);

    TrainResult result;
    result.model = model;
    result.best_dev_uas = -1;
    int flat_epochs = 0, decays = 0;

    std::vector<std::size_t> idx(train_set.size());
    std::iota(idx.begin(), idx.end(), 0);

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        std::shuffle(idx.begin(), idx.end(), rng);
        LossBreakdown epoch_loss;
        int batches = 0;
        for (std::size_t start = 0; start < idx.size();
             start += static_cast<std::size_t>(cfg.batch_size)) {
            std::vector<const Sentence*> batch;
            for (std::size_t i = start;
                 i < std::min(idx.size(), start + static_cast<std::size_t>(cfg.batch_size));
                 ++i)
                batch.push_back(&train_set[idx[i]]);
            ParamSet grads;
            LossBreakdown lb = gradients(batch, model, grads, ScoreMode::kTrain, rng);
            epoch_loss.l_arc += lb.l_arc;
            epoch_loss.l_rel += lb.l_rel;
            epoch_loss.l_order += lb.l_order;
            ++batches;
            step(opt, model, grads);
        }

        const std::vector<Sentence>& dev = dev_set.empty() ? train_set : dev_set;
        DevScores ds = evaluate_dev(model, dev, dev_decoder);

        EpochLog el;
        el.epoch = epoch;
        el.l_arc = epoch_loss.l_arc / batches;
        el.l_rel = epoch_loss.l_rel / batches;
        el.l_order = epoch_loss.l_order / batches;
        el.dev_uas = ds.uas;
        el.dev_las = ds.las;
        el.dev_order_acc = ds.order_acc;
        el.lr = opt.lr;

        if (ds.uas >= result.best_dev_uas + 1e-4 || result.best_dev_uas < 0) {
            result.best_dev_uas = std::max(result.best_dev_uas, ds.uas);
            result.model = model;
            flat_epochs = 0;
            el.improved = true;
        } else {
            ++flat_epochs;
            if (flat_epochs >= cfg.patience) {
                opt.lr *= cfg.decay;
                ++decays;
                flat_epochs = 0;
            }
        }
        result.log.push_back(el);
        if (log_stream)
            *log_stream << "epoch " << epoch << ": loss " << el.l_arc << "/" << el.l_rel
                        << "/" << el.l_order << ", dev UAS " << 100 * el.dev_uas
                        << " LAS " << 100 * el.dev_las << " OrderAcc "
                        << 100 * el.dev_order_acc << ", lr " << el.lr
                        << (el.improved ? " *" : "") << "\n";
        if (decays > cfg.max_decays) break;
    }
    return result;
}

}  // namespace ggparse
