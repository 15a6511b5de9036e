#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "ggparse/conll.hpp"

using namespace ggparse;

namespace {

const char* kTwoTokenBlock =
    "1\tHe\t_\tPRON\tPRP\t_\t2\tnsubj\t_\t_\n"
    "2\tran\t_\tVERB\tVBD\t_\t0\troot\t_\t_\n\n";

std::string tmp_path(const char* name) {
    return std::string("/tmp/ggparse_test_") + name;
}

}  // namespace

TEST_CASE("parse_conll reads a two-token block") {
    auto sents = parse_conll(kTwoTokenBlock, ConllFormat::kConllX);
    REQUIRE(sents.size() == 1);
    const Sentence& s = sents[0];
    REQUIRE(s.size() == 2);
    CHECK(s.tokens[0].form == "He");
    CHECK(s.tokens[0].gold_head == 2);
    CHECK(s.tokens[1].gold_head == 0);
    CHECK(s.tokens[1].gold_label == "root");
}

TEST_CASE("parse_conll: empty input gives empty list") {
    CHECK(parse_conll("", ConllFormat::kConllU).empty());
}

TEST_CASE("parse_conll skips conllu range and empty-node lines") {
    std::string text =
        "# sent_id = 1\n"
        "1-2\tcannot\t_\t_\t_\t_\t_\t_\t_\t_\n"
        "1\tcan\t_\tAUX\t_\t_\t0\troot\t_\t_\n"
        "2\tnot\t_\tPART\t_\t_\t1\tadvmod\t_\t_\n"
        "2.1\telided\t_\t_\t_\t_\t_\t_\t_\t_\n\n";
    auto sents = parse_conll(text, ConllFormat::kConllU);
    REQUIRE(sents.size() == 1);
    REQUIRE(sents[0].size() == 2);
    CHECK(sents[0].tokens[0].form == "can");
    CHECK(sents[0].tokens[1].index == 2);
    CHECK(sents[0].comments.size() == 1);
    for (const auto& t : sents[0].tokens) {
        CHECK(t.gold_head >= 0);
        CHECK(t.gold_head <= sents[0].size());
    }
}

TEST_CASE("parse_conll errors carry line numbers") {
    CHECK_THROWS_WITH_AS(parse_conll("1\tonly\tthree\n", ConllFormat::kConllX),
                         doctest::Contains(":1:"), FormatError);
    CHECK_THROWS_AS(
        parse_conll("1\tw\t_\tX\t_\t_\tNaN\tdep\t_\t_\n", ConllFormat::kConllX),
        FormatError);
}

TEST_CASE("write then read round-trips exactly") {
    auto sents = parse_conll(kTwoTokenBlock, ConllFormat::kConllX);
    std::string path = tmp_path("roundtrip.conllx");
    write_conll(sents, {}, path, ConllFormat::kConllX);
    auto again = read_conll(path, ConllFormat::kConllX);
    REQUIRE(again.size() == 1);
    CHECK(format_conll(again, {}, ConllFormat::kConllX) ==
          format_conll(sents, {}, ConllFormat::kConllX));
    std::remove(path.c_str());
}

TEST_CASE("write_conll substitutes predicted heads") {
    auto sents = parse_conll(kTwoTokenBlock, ConllFormat::kConllX);
    DepTree pred(std::vector<int>{2, 0});
    std::string text = format_conll(sents, {pred}, ConllFormat::kConllX);
    CHECK(text.find("\t2\tnsubj") != std::string::npos);
    CHECK(text.find("\t0\troot") != std::string::npos);
}

TEST_CASE("write_conll: zero sentences writes an empty file") {
    CHECK(format_conll({}, {}, ConllFormat::kConllU).empty());
}

TEST_CASE("write_conll rejects length mismatch") {
    auto sents = parse_conll(kTwoTokenBlock, ConllFormat::kConllX);
    DepTree bad(std::vector<int>{0});
    CHECK_THROWS_AS(format_conll(sents, {bad}, ConllFormat::kConllX),
                    std::invalid_argument);
}

TEST_CASE("build_vocab applies the frequency cutoff") {
    std::string text;
    for (int i = 0; i < 3; ++i)
        text += std::to_string(1) + "\ta\t_\tX\t_\t_\t0\troot\t_\t_\n\n";
    text += "1\tb\t_\tX\t_\t_\t0\troot\t_\t_\n\n";
    auto sents = parse_conll(text, ConllFormat::kConllX);
    Vocab v = build_vocab(sents, 2);
    CHECK(v.word.count("a") == 1);
    CHECK(v.word.count("b") == 0);
    CHECK(v.word_id("b") == Vocab::kUnk);
    CHECK(v.word_id("never-seen") == Vocab::kUnk);

    Vocab v1 = build_vocab(sents, 1);
    CHECK(v1.word.count("b") == 1);
}

TEST_CASE("build_vocab label ids are dense") {
    std::string text =
        "1\tthe\t_\tDET\t_\t_\t2\tdet\t_\t_\n"
        "2\tdog\t_\tNOUN\t_\t_\t3\tnsubj\t_\t_\n"
        "3\tbarks\t_\tVERB\t_\t_\t0\troot\t_\t_\n\n";
    Vocab v = build_vocab(parse_conll(text, ConllFormat::kConllX), 1);
    CHECK(v.num_labels() == 3);
    for (const auto& name : {"root", "nsubj", "det"})
        CHECK(v.label_id(name) < 3);
}

TEST_CASE("vocab ids are deterministic") {
    auto sents = parse_conll(kTwoTokenBlock, ConllFormat::kConllX);
    Vocab a = build_vocab(sents, 1);
    Vocab b = build_vocab(sents, 1);
    CHECK(a.word == b.word);
    CHECK(a.pos == b.pos);
    CHECK(a.chr == b.chr);
    CHECK(a.label_names == b.label_names);
}

TEST_CASE("is_punctuation conventions") {
    Token t;
    t.upos = "PUNCT";
    CHECK(is_punctuation(t, PunctConvention::kUd));
    t.upos = "NOUN";
    CHECK_FALSE(is_punctuation(t, PunctConvention::kUd));
    t.xpos = ".";
    CHECK(is_punctuation(t, PunctConvention::kPtb));
    t.xpos = "``";
    CHECK(is_punctuation(t, PunctConvention::kPtb));
    t.xpos = "NN";
    CHECK_FALSE(is_punctuation(t, PunctConvention::kPtb));
}
