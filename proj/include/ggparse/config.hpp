#pragma once

#include <map>
#include <stdexcept>
#include <string>

namespace ggparse {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// All hyperparameters and switches, as a flat key=value set. Any field can be
// overridden on the CLI as --name=value. Defaults are sized for desk-scale
// experiments; scale hidden_dim/arc_dim up for real treebanks.
struct Config {
    // model dims
    int word_dim = 100;
    int pos_dim = 32;
    int char_dim = 8;
    int char_filters = 50;   // char conv: window 3, 50 filters
    int hidden_dim = 128;    // per direction
    int arc_dim = 128;
    int order_dim = 64;
    int label_dim = 64;
    int extern_dim = 0;      // optional fixed external embeddings

    // training
    double learning_rate = 1e-3;   // eta_0
    double beta1 = 0.9;
    double beta2 = 0.9;
    double adam_eps = 1e-8;
    double decay = 0.75;           // rho, applied when dev UAS stops improving
    double clip_norm = 5.0;
    double embed_dropout = 0.33;
    double recurrent_dropout = 0.33;
    int batch_size = 32;
    int max_epochs = 100;
    int patience = 3;              // flat epochs before one decay
    int max_decays = 10;
    int min_word_freq = 2;
    unsigned long long seed = 1;

    // switches
    bool order_offset_on_raw = false;  // s_final on raw biaffine instead of sigmoid
    bool mst_on_prob = false;          // MST over probabilities instead of raw scores
    bool np_tie_by_confidence = false; // non-projective sort ties by logit confidence

    std::string extern_embed_file;

    static Config from_map(const std::map<std::string, std::string>& kv);
    std::map<std::string, std::string> to_map() const;
    void set(const std::string& key, const std::string& value);
};

Config load_config(const std::string& path);
std::map<std::string, std::string> parse_kv_text(const std::string& text);

}  // namespace ggparse
