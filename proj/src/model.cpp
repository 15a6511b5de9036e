#include "ggparse/model.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ggparse {

namespace {
constexpr char kMagic[] = "GGPK1\n";
constexpr int kFormatVersion = 1;
}  // namespace

void ParamSet::visit(const std::function<void(const std::string&, Eigen::MatrixXd&)>& f) {
    f("E_word", E_word);
    f("E_pos", E_pos);
    f("E_char", E_char);
    f("root_embed", root_embed);
    f("W_conv", W_conv);
    f("b_conv", b_conv);
    f("W_fwd", W_fwd);
    f("U_fwd", U_fwd);
    f("b_fwd", b_fwd);
    f("W_bwd", W_bwd);
    f("U_bwd", U_bwd);
    f("b_bwd", b_bwd);
    f("W_head", W_head);
    f("b_head", b_head);
    f("W_dep", W_dep);
    f("b_dep", b_dep);
    f("W_ord", W_ord);
    f("b_ord", b_ord);
    f("W_lhead", W_lhead);
    f("b_lhead", b_lhead);
    f("W_ldep", W_ldep);
    f("b_ldep", b_ldep);
    f("W_arc", W_arc);
    f("U_arc", U_arc);
    f("V_arc", V_arc);
    f("b_arc", b_arc);
    f("W_order", W_order);
    f("b_order", b_order);
    for (std::size_t i = 0; i < W_lab.size(); ++i)
        f("W_lab." + std::to_string(i), W_lab[i]);
    f("U_lab", U_lab);
    f("V_lab", V_lab);
    f("b_lab", b_lab);
}

void ParamSet::visit(
    const std::function<void(const std::string&, const Eigen::MatrixXd&)>& f) const {
    const_cast<ParamSet*>(this)->visit(
        [&](const std::string& name, Eigen::MatrixXd& m) { f(name, m); });
}

void ParamSet::set_zero() {
    visit([](const std::string&, Eigen::MatrixXd& m) { m.setZero(); });
}

ParamSet ParamSet::zeros_like() const {
    ParamSet z = *this;
    z.set_zero();
    return z;
}

double ParamSet::global_norm() const {
    double sq = 0;
    visit([&](const std::string&, const Eigen::MatrixXd& m) { sq += m.squaredNorm(); });
    return std::sqrt(sq);
}

void ParamSet::scale(double s) {
    visit([&](const std::string&, Eigen::MatrixXd& m) { m *= s; });
}

void ParamSet::add_scaled(const ParamSet& other, double s) {
    std::vector<const Eigen::MatrixXd*> src;
    other.visit([&](const std::string&, const Eigen::MatrixXd& m) { src.push_back(&m); });
    std::size_t i = 0;
    visit([&](const std::string&, Eigen::MatrixXd& m) { m += s * *src[i++]; });
}

Model init_model(const Config& cfg, const Vocab& vocab, std::mt19937_64& rng) {
    Model model;
    model.cfg = cfg;
    model.vocab = vocab;
    ParamSet& p = model.params;

    auto glorot = [&rng](int rows, int cols) {
        double limit = std::sqrt(6.0 / (rows + cols));
        std::uniform_real_distribution<double> dist(-limit, limit);
        Eigen::MatrixXd m(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) m(i, j) = dist(rng);
        return m;
    };

    const int dx = cfg.word_dim + cfg.pos_dim + cfg.char_filters + cfg.extern_dim;
    const int dh = cfg.hidden_dim;
    const int dc = 2 * dh;
    const int L = std::max(1, vocab.num_labels());

    p.E_word = glorot(vocab.num_words(), cfg.word_dim);
    p.E_pos = glorot(vocab.num_pos(), cfg.pos_dim);
    p.E_char = glorot(vocab.num_chars(), cfg.char_dim);
    p.E_word.row(Vocab::kPad).setZero();
    p.E_pos.row(Vocab::kPad).setZero();
    p.E_char.row(Vocab::kPad).setZero();
    p.root_embed = glorot(dx, 1);
    p.W_conv = glorot(cfg.char_filters, 3 * cfg.char_dim);
    p.b_conv = Eigen::MatrixXd::Zero(cfg.char_filters, 1);
    p.W_fwd = glorot(dh, dx);
    p.U_fwd = glorot(dh, dh);
    p.b_fwd = Eigen::MatrixXd::Zero(dh, 1);
    p.W_bwd = glorot(dh, dx);
    p.U_bwd = glorot(dh, dh);
    p.b_bwd = Eigen::MatrixXd::Zero(dh, 1);
    p.W_head = glorot(cfg.arc_dim, dc);
    p.b_head = Eigen::MatrixXd::Zero(cfg.arc_dim, 1);
    p.W_dep = glorot(cfg.arc_dim, dc);
    p.b_dep = Eigen::MatrixXd::Zero(cfg.arc_dim, 1);
    p.W_ord = glorot(cfg.order_dim, dc);
    p.b_ord = Eigen::MatrixXd::Zero(cfg.order_dim, 1);
    p.W_lhead = glorot(cfg.label_dim, dc);
    p.b_lhead = Eigen::MatrixXd::Zero(cfg.label_dim, 1);
    p.W_ldep = glorot(cfg.label_dim, dc);
    p.b_ldep = Eigen::MatrixXd::Zero(cfg.label_dim, 1);
    p.W_arc = glorot(cfg.arc_dim, cfg.arc_dim);
    p.U_arc = glorot(cfg.arc_dim, 1);
    p.V_arc = glorot(cfg.arc_dim, 1);
    p.b_arc = Eigen::MatrixXd::Zero(1, 1);
    p.W_order = glorot(33, cfg.order_dim);
    p.b_order = Eigen::MatrixXd::Zero(33, 1);
    p.W_lab.clear();
    for (int r = 0; r < L; ++r) p.W_lab.push_back(glorot(cfg.label_dim, cfg.label_dim));
    p.U_lab = glorot(L, cfg.label_dim);
    p.V_lab = glorot(L, cfg.label_dim);
    p.b_lab = Eigen::MatrixXd::Zero(L, 1);
    return model;
}

namespace {

nlohmann::json vocab_to_json(const Vocab& v) {
    nlohmann::json j;
    j["word"] = v.word;
    j["pos"] = v.pos;
    j["char"] = v.chr;
    j["label"] = v.label;
    j["label_names"] = v.label_names;
    j["min_word_freq"] = v.min_word_freq;
    return j;
}

Vocab vocab_from_json(const nlohmann::json& j) {
    Vocab v;
    v.word = j.at("word").get<std::map<std::string, int>>();
    v.pos = j.at("pos").get<std::map<std::string, int>>();
    v.chr = j.at("char").get<std::map<std::string, int>>();
    v.label = j.at("label").get<std::map<std::string, int>>();
    v.label_names = j.at("label_names").get<std::vector<std::string>>();
    v.min_word_freq = j.at("min_word_freq").get<int>();
    return v;
}

}  // namespace

void save_model(const Model& model, const std::string& path) {
    nlohmann::json header;
    header["format_version"] = kFormatVersion;
    header["config"] = model.cfg.to_map();
    header["vocab"] = vocab_to_json(model.vocab);
    nlohmann::json manifest = nlohmann::json::array();
    model.params.visit([&](const std::string& name, const Eigen::MatrixXd& m) {
        manifest.push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}});
    });
    header["params"] = manifest;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw ModelError("cannot open " + path + " for writing");
    out.write(kMagic, 6);
    std::string hs = header.dump();
    std::uint64_t len = hs.size();
    unsigned char lenb[8];
    for (int i = 0; i < 8; ++i) lenb[i] = static_cast<unsigned char>((len >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(lenb), 8);
    out.write(hs.data(), static_cast<std::streamsize>(hs.size()));
    model.params.visit([&](const std::string&, const Eigen::MatrixXd& m) {
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            for (Eigen::Index r = 0; r < m.rows(); ++r) {
                float f = static_cast<float>(m(r, c));
                out.write(reinterpret_cast<const char*>(&f), 4);
            }
    });
    if (!out) throw ModelError("write failed for " + path);
}

Model load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelError("cannot open model file " + path);
    char magic[6];
    in.read(magic, 6);
    if (!in || std::string(magic, 6) != kMagic) throw ModelError("bad magic in " + path);
    unsigned char lenb[8];
    in.read(reinterpret_cast<char*>(lenb), 8);
    std::uint64_t len = 0;
    for (int i = 0; i < 8; ++i) len |= static_cast<std::uint64_t>(lenb[i]) << (8 * i);
    std::string hs(len, '\0');
    in.read(hs.data(), static_cast<std::streamsize>(len));
    if (!in) throw ModelError("truncated header in " + path);
    nlohmann::json header = nlohmann::json::parse(hs);
    if (header.at("format_version").get<int>() != kFormatVersion)
        throw ModelError("unsupported checkpoint version in " + path);

    Config cfg = Config::from_map(
        header.at("config").get<std::map<std::string, std::string>>());
    Vocab vocab = vocab_from_json(header.at("vocab"));
    std::mt19937_64 rng(0);
    Model model = init_model(cfg, vocab, rng);

    std::size_t idx = 0;
    auto manifest = header.at("params");
    model.params.visit([&](const std::string& name, Eigen::MatrixXd& m) {
        if (idx >= manifest.size()) throw ModelError("manifest too short in " + path);
        const auto& entry = manifest[idx++];
        if (entry.at("name").get<std::string>() != name ||
            entry.at("rows").get<Eigen::Index>() != m.rows() ||
            entry.at("cols").get<Eigen::Index>() != m.cols())
            throw ModelError("shape mismatch for parameter '" + name + "' in " + path);
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            for (Eigen::Index r = 0; r < m.rows(); ++r) {
                float f;
                in.read(reinterpret_cast<char*>(&f), 4);
                m(r, c) = f;
            }
    });
    if (idx != manifest.size()) throw ModelError("manifest too long in " + path);
    if (!in) throw ModelError("truncated parameter data in " + path);
    if (!cfg.extern_embed_file.empty())
        load_extern_embeddings(model, cfg.extern_embed_file);
    return model;
}

void load_extern_embeddings(Model& model, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelError("cannot open embedding file " + path);
    std::string line;
    if (!std::getline(in, line)) throw ModelError("empty embedding file " + path);
    int dim = 0;
    try {
        dim = std::stoi(line);
    } catch (...) {
        throw ModelError("embedding file must start with a dimension line: " + path);
    }
    if (dim != model.cfg.extern_dim)
        throw ModelError("embedding dimension " + std::to_string(dim) +
                         " does not match extern_dim " +
                         std::to_string(model.cfg.extern_dim));
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos) throw ModelError("embedding line missing TAB");
        std::string form = line.substr(0, tab);
        std::istringstream vs(line.substr(tab + 1));
        Eigen::VectorXd v(dim);
        for (int i = 0; i < dim; ++i)
            if (!(vs >> v(i))) throw ModelError("short embedding vector for '" + form + "'");
        model.extern_embed[form] = std::move(v);
    }
}

}  // namespace ggparse
