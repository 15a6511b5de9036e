#include "ggparse/conll.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace ggparse {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find('\t', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

bool parse_int(const std::string& s, int& out) {
    if (s.empty()) return false;
    std::size_t i = 0;
    long v = 0;
    for (; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9') return false;
        v = v * 10 + (s[i] - '0');
        if (v > 1000000) return false;
    }
    out = static_cast<int>(v);
    return true;
}

int lookup(const std::map<std::string, int>& m, const std::string& k, int fallback) {
    auto it = m.find(k);
    return it == m.end() ? fallback : it->second;
}

// frequency desc, then lexicographic; PAD=0, UNK=1
std::map<std::string, int> assign_ids(const std::map<std::string, long>& freq, long cutoff) {
    std::vector<std::pair<std::string, long>> items(freq.begin(), freq.end());
    std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    std::map<std::string, int> ids;
    ids["<PAD>"] = Vocab::kPad;
    ids["<UNK>"] = Vocab::kUnk;
    int next = 2;
    for (const auto& [sym, count] : items) {
        if (count < cutoff) continue;
        if (ids.count(sym)) continue;
        ids[sym] = next++;
    }
    return ids;
}

}  // namespace

int Vocab::word_id(const std::string& w) const { return lookup(word, w, kUnk); }
int Vocab::pos_id(const std::string& p) const { return lookup(pos, p, kUnk); }
int Vocab::char_id(const std::string& c) const { return lookup(chr, c, kUnk); }
int Vocab::label_id(const std::string& l) const { return lookup(label, l, 0); }

std::vector<Sentence> parse_conll(const std::string& text, ConllFormat format,
                                  const std::string& source_name) {
    std::vector<Sentence> sentences;
    Sentence cur;
    int line_no = 0;
    int sent_no = 0;
    std::istringstream in(text);
    std::string line;

    auto flush = [&]() {
        if (!cur.tokens.empty() || !cur.comments.empty()) {
            ++sent_no;
            if (cur.source_id.empty())
                cur.source_id = source_name + ":" + std::to_string(sent_no);
            // re-index after dropped range/empty-node lines
            for (std::size_t i = 0; i < cur.tokens.size(); ++i)
                cur.tokens[i].index = static_cast<int>(i) + 1;
            sentences.push_back(std::move(cur));
            cur = Sentence{};
        }
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            flush();
            continue;
        }
        if (line[0] == '#') {
            cur.comments.push_back(line);
            continue;
        }
        auto cols = split_tabs(line);
        if (cols.size() != 10)
            throw FormatError(source_name + ":" + std::to_string(line_no) +
                              ": expected 10 tab-separated columns, got " +
                              std::to_string(cols.size()));
        if (format == ConllFormat::kConllU) {
            // multiword ranges "i-j" and empty nodes "i.j" carry no tree arc
            if (cols[0].find('-') != std::string::npos ||
                cols[0].find('.') != std::string::npos)
                continue;
        }
        Token tok;
        if (!parse_int(cols[0], tok.index))
            throw FormatError(source_name + ":" + std::to_string(line_no) +
                              ": non-integer token id '" + cols[0] + "'");
        tok.form = cols[1];
        tok.lemma = cols[2];
        tok.upos = cols[3];
        tok.xpos = cols[4];
        tok.feats = cols[5];
        if (!parse_int(cols[6], tok.gold_head))
            throw FormatError(source_name + ":" + std::to_string(line_no) +
                              ": non-integer HEAD '" + cols[6] + "'");
        tok.gold_label = cols[7];
        tok.col9 = cols[8];
        tok.col10 = cols[9];
        cur.tokens.push_back(std::move(tok));
    }
    flush();
    return sentences;
}

std::vector<Sentence> read_conll(const std::string& path, ConllFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_conll(buf.str(), format, path);
}

std::string format_conll(const std::vector<Sentence>& sentences,
                         const std::vector<DepTree>& predicted, ConllFormat format) {
    (void)format;  // columns coincide for the retained fields
    if (!predicted.empty() && predicted.size() != sentences.size())
        throw std::invalid_argument("sentence/tree count mismatch");
    std::ostringstream out;
    for (std::size_t s = 0; s < sentences.size(); ++s) {
        const Sentence& sent = sentences[s];
        const DepTree* tree = predicted.empty() ? nullptr : &predicted[s];
        if (tree && tree->n != sent.size())
            throw std::invalid_argument("tree length mismatch for sentence " +
                                        sent.source_id);
        for (const auto& c : sent.comments) out << c << '\n';
        for (const Token& t : sent.tokens) {
            int head = tree ? tree->heads[t.index - 1] : t.gold_head;
            std::string label = t.gold_label;
            if (tree && !tree->labels.empty()) label = tree->labels[t.index - 1];
            out << t.index << '\t' << t.form << '\t' << t.lemma << '\t' << t.upos
                << '\t' << t.xpos << '\t' << t.feats << '\t' << head << '\t'
                << label << '\t' << t.col9 << '\t' << t.col10 << '\n';
        }
        out << '\n';
    }
    return out.str();
}

void write_conll(const std::vector<Sentence>& sentences,
                 const std::vector<DepTree>& predicted, const std::string& path,
                 ConllFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open " + path + " for writing");
    out << format_conll(sentences, predicted, format);
}

Vocab build_vocab(const std::vector<Sentence>& sentences, int min_word_freq) {
    std::map<std::string, long> wf, pf, cf, lf;
    for (const auto& s : sentences) {
        for (const auto& t : s.tokens) {
            ++wf[t.form];
            ++pf[t.upos];
            ++lf[t.gold_label];
            for (char c : t.form) ++cf[std::string(1, c)];
        }
    }
    Vocab v;
    v.min_word_freq = min_word_freq;
    v.word = assign_ids(wf, min_word_freq);
    v.pos = assign_ids(pf, 1);
    v.chr = assign_ids(cf, 1);
    // labels: dense ids from 0, no UNK entry
    std::vector<std::pair<std::string, long>> labels(lf.begin(), lf.end());
    std::sort(labels.begin(), labels.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    for (const auto& [name, count] : labels) {
        (void)count;
        int id = static_cast<int>(v.label.size());
        v.label[name] = id;
        v.label_names.push_back(name);
    }
    return v;
}

bool is_punctuation(const Token& token, PunctConvention convention) {
    if (convention == PunctConvention::kUd) return token.upos == "PUNCT";
    static const char* kPtbPunct[] = {"``", "''", ":", ",", "."};
    for (const char* p : kPtbPunct)
        if (token.xpos == p) return true;
    return false;
}

DepTree gold_tree(const Sentence& sentence) {
    DepTree t;
    t.n = sentence.size();
    for (const Token& tok : sentence.tokens) {
        t.heads.push_back(tok.gold_head);
        t.labels.push_back(tok.gold_label);
    }
    return t;
}

}  // namespace ggparse
