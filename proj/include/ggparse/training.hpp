#pragma once

#include <random>
#include <string>
#include <vector>

#include "ggparse/decoder.hpp"
#include "ggparse/model.hpp"
#include "ggparse/scorer.hpp"
#include "ggparse/types.hpp"

namespace ggparse {

struct LossBreakdown {
    double l_arc = 0;
    double l_rel = 0;
    double l_order = 0;
    double total() const { return l_arc + l_rel + l_order; }
};

// Summed negative log-likelihoods over the sentence: arc softmax per
// dependent column (diagonal masked), label softmax at the gold head, order
// softmax over the 33 layer classes with targets capped at 32. The vocab maps
// gold label strings to score columns; without one the label target is id 0.
LossBreakdown loss(const Sentence& sentence, const DepTree& gold, const ScoreSet& scores,
                   const Vocab* vocab = nullptr);

// Loss plus analytic gradients of the mean per-sentence loss over a batch.
// Deterministic in eval mode; summation order over the batch is fixed.
LossBreakdown gradients(const std::vector<const Sentence*>& batch, const Model& model,
                        ParamSet& grads, ScoreMode mode, std::mt19937_64& rng);

struct OptimizerState {
    ParamSet m, v;
    long step_count = 0;
    double lr = 1e-3;
};

OptimizerState init_optimizer(const Model& model);

// Global-norm clip at cfg.clip_norm, then Adam with beta1 = beta2 = 0.9.
void step(OptimizerState& opt, Model& model, ParamSet& grads);

struct EpochLog {
    int epoch = 0;
    double l_arc = 0, l_rel = 0, l_order = 0;
    double dev_uas = 0, dev_las = 0, dev_order_acc = 0;
    double lr = 0;
    bool improved = false;
};

struct TrainResult {
    Model model;  // best-dev checkpoint
    std::vector<EpochLog> log;
    double best_dev_uas = 0;
};

// Full training loop: epochs over shuffled batches, dev UAS after each epoch,
// lr annealed by cfg.decay after cfg.patience flat epochs, stop after
// cfg.max_decays decays or cfg.max_epochs. Aborts on non-finite loss.
TrainResult train(const Config& cfg, const std::vector<Sentence>& train_set,
                  const std::vector<Sentence>& dev_set, DecoderKind dev_decoder,
                  std::ostream* log_stream = nullptr);

}  // namespace ggparse
