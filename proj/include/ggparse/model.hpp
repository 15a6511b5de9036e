#pragma once

#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "ggparse/config.hpp"
#include "ggparse/conll.hpp"

namespace ggparse {

struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Every learnable matrix of the network. Vectors are stored as k x 1 matrices
// so one visitor covers optimizer state, clipping and serialization.
struct ParamSet {
    Eigen::MatrixXd E_word;            // V_w x d_w
    Eigen::MatrixXd E_pos;             // V_p x d_p
    Eigen::MatrixXd E_char;            // V_c x d_c
    Eigen::MatrixXd root_embed;        // d_x x 1, learned root input vector
    Eigen::MatrixXd W_conv;            // filters x 3*d_c
    Eigen::MatrixXd b_conv;            // filters x 1
    Eigen::MatrixXd W_fwd, U_fwd, b_fwd;  // forward recurrence
    Eigen::MatrixXd W_bwd, U_bwd, b_bwd;  // backward recurrence
    Eigen::MatrixXd W_head, b_head;    // ReLU MLPs over contextual states
    Eigen::MatrixXd W_dep, b_dep;
    Eigen::MatrixXd W_ord, b_ord;
    Eigen::MatrixXd W_lhead, b_lhead;
    Eigen::MatrixXd W_ldep, b_ldep;
    Eigen::MatrixXd W_arc;             // d_arc x d_arc bilinear term
    Eigen::MatrixXd U_arc, V_arc;      // d_arc x 1 linear terms
    Eigen::MatrixXd b_arc;             // 1 x 1
    Eigen::MatrixXd W_order, b_order;  // 33 x d_ord, 33 x 1
    std::vector<Eigen::MatrixXd> W_lab;  // per label: d_lab x d_lab
    Eigen::MatrixXd U_lab, V_lab;      // L x d_lab each
    Eigen::MatrixXd b_lab;             // L x 1

    void visit(const std::function<void(const std::string&, Eigen::MatrixXd&)>& f);
    void visit(const std::function<void(const std::string&, const Eigen::MatrixXd&)>& f) const;

    void set_zero();
    ParamSet zeros_like() const;
    double global_norm() const;
    void scale(double s);
    void add_scaled(const ParamSet& other, double s);
};

struct Model {
    Config cfg;
    Vocab vocab;
    ParamSet params;
    // fixed external embeddings, concatenated into the encoder input when
    // extern_dim > 0; forms missing from the table get zeros
    std::unordered_map<std::string, Eigen::VectorXd> extern_embed;

    int input_dim() const {
        return cfg.word_dim + cfg.pos_dim + cfg.char_filters + cfg.extern_dim;
    }
    int context_dim() const { return 2 * cfg.hidden_dim; }
};

Model init_model(const Config& cfg, const Vocab& vocab, std::mt19937_64& rng);

// Checkpoint container: magic, little-endian JSON header length, JSON header
// (format version, dims, vocab, config echo, parameter manifest), then raw
// float32 blocks in visit order. load rejects version or shape mismatches.
void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

// "form<TAB>v1 v2 ... vk" lines after a single header line giving k.
void load_extern_embeddings(Model& model, const std::string& path);

}  // namespace ggparse
