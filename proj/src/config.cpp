#include "ggparse/config.hpp"

#include <fstream>
#include <sstream>

namespace ggparse {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

int to_int(const std::string& k, const std::string& v) {
    try {
        return std::stoi(v);
    } catch (...) {
        throw ConfigError("bad integer for key '" + k + "': " + v);
    }
}

double to_double(const std::string& k, const std::string& v) {
    try {
        return std::stod(v);
    } catch (...) {
        throw ConfigError("bad number for key '" + k + "': " + v);
    }
}

bool to_bool(const std::string& k, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("bad boolean for key '" + k + "': " + v);
}

}  // namespace

void Config::set(const std::string& key, const std::string& value) {
    if (key == "word_dim") word_dim = to_int(key, value);
    else if (key == "pos_dim") pos_dim = to_int(key, value);
    else if (key == "char_dim") char_dim = to_int(key, value);
    else if (key == "char_filters") char_filters = to_int(key, value);
    else if (key == "hidden_dim") hidden_dim = to_int(key, value);
    else if (key == "arc_dim") arc_dim = to_int(key, value);
    else if (key == "order_dim") order_dim = to_int(key, value);
    else if (key == "label_dim") label_dim = to_int(key, value);
    else if (key == "extern_dim") extern_dim = to_int(key, value);
    else if (key == "learning_rate") learning_rate = to_double(key, value);
    else if (key == "beta1") beta1 = to_double(key, value);
    else if (key == "beta2") beta2 = to_double(key, value);
    else if (key == "adam_eps") adam_eps = to_double(key, value);
    else if (key == "decay") decay = to_double(key, value);
    else if (key == "clip_norm") clip_norm = to_double(key, value);
    else if (key == "embed_dropout") embed_dropout = to_double(key, value);
    else if (key == "recurrent_dropout") recurrent_dropout = to_double(key, value);
    else if (key == "batch_size") batch_size = to_int(key, value);
    else if (key == "max_epochs") max_epochs = to_int(key, value);
    else if (key == "patience") patience = to_int(key, value);
    else if (key == "max_decays") max_decays = to_int(key, value);
    else if (key == "min_word_freq") min_word_freq = to_int(key, value);
    else if (key == "seed") seed = std::stoull(value);
    else if (key == "order_offset_on_raw") order_offset_on_raw = to_bool(key, value);
    else if (key == "mst_on_prob") mst_on_prob = to_bool(key, value);
    else if (key == "np_tie_by_confidence") np_tie_by_confidence = to_bool(key, value);
    else if (key == "extern_embed_file") extern_embed_file = value;
    else throw ConfigError("unknown config key '" + key + "'");
}

Config Config::from_map(const std::map<std::string, std::string>& kv) {
    Config c;
    for (const auto& [k, v] : kv) c.set(k, v);
    return c;
}

std::map<std::string, std::string> Config::to_map() const {
    auto num = [](double d) {
        std::ostringstream os;
        os.precision(17);
        os << d;
        return os.str();
    };
    return {
        {"word_dim", std::to_string(word_dim)},
        {"pos_dim", std::to_string(pos_dim)},
        {"char_dim", std::to_string(char_dim)},
        {"char_filters", std::to_string(char_filters)},
        {"hidden_dim", std::to_string(hidden_dim)},
        {"arc_dim", std::to_string(arc_dim)},
        {"order_dim", std::to_string(order_dim)},
        {"label_dim", std::to_string(label_dim)},
        {"extern_dim", std::to_string(extern_dim)},
        {"learning_rate", num(learning_rate)},
        {"beta1", num(beta1)},
        {"beta2", num(beta2)},
        {"adam_eps", num(adam_eps)},
        {"decay", num(decay)},
        {"clip_norm", num(clip_norm)},
        {"embed_dropout", num(embed_dropout)},
        {"recurrent_dropout", num(recurrent_dropout)},
        {"batch_size", std::to_string(batch_size)},
        {"max_epochs", std::to_string(max_epochs)},
        {"patience", std::to_string(patience)},
        {"max_decays", std::to_string(max_decays)},
        {"min_word_freq", std::to_string(min_word_freq)},
        {"seed", std::to_string(seed)},
        {"order_offset_on_raw", order_offset_on_raw ? "true" : "false"},
        {"mst_on_prob", mst_on_prob ? "true" : "false"},
        {"np_tie_by_confidence", np_tie_by_confidence ? "true" : "false"},
        {"extern_embed_file", extern_embed_file},
    };
}

std::map<std::string, std::string> parse_kv_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
        kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
    }
    return kv;
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return Config::from_map(parse_kv_text(buf.str()));
}

}  // namespace ggparse
