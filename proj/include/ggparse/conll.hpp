#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ggparse/types.hpp"

namespace ggparse {

enum class ConllFormat { kConllX, kConllU };
enum class PunctConvention { kUd, kPtb };

struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Symbol tables for words, POS tags, characters and relation labels.
// Ids are dense and deterministic: PAD=0, UNK=1, then observed symbols
// sorted by frequency (descending) and lexicographically within ties.
struct Vocab {
    std::map<std::string, int> word;
    std::map<std::string, int> pos;
    std::map<std::string, int> chr;
    std::map<std::string, int> label;
    std::vector<std::string> label_names;  // id -> label string
    int min_word_freq = 2;

    static constexpr int kPad = 0;
    static constexpr int kUnk = 1;

    int word_id(const std::string& w) const;
    int pos_id(const std::string& p) const;
    int char_id(const std::string& c) const;
    int label_id(const std::string& l) const;  // unseen labels fall back to 0

    int num_words() const { return static_cast<int>(word.size()); }
    int num_pos() const { return static_cast<int>(pos.size()); }
    int num_chars() const { return static_cast<int>(chr.size()); }
    int num_labels() const { return static_cast<int>(label.size()); }
};

std::vector<Sentence> read_conll(const std::string& path, ConllFormat format);
std::vector<Sentence> parse_conll(const std::string& text, ConllFormat format,
                                  const std::string& source_name = "<string>");

// Writes sentences with predicted heads/labels substituted. If predicted is
// empty, gold annotation is written back unchanged.
void write_conll(const std::vector<Sentence>& sentences,
                 const std::vector<DepTree>& predicted, const std::string& path,
                 ConllFormat format);
std::string format_conll(const std::vector<Sentence>& sentences,
                         const std::vector<DepTree>& predicted, ConllFormat format);

Vocab build_vocab(const std::vector<Sentence>& sentences, int min_word_freq = 2);

bool is_punctuation(const Token& token, PunctConvention convention);

// Gold annotation of a sentence as a DepTree.
DepTree gold_tree(const Sentence& sentence);

}  // namespace ggparse
