#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "ggparse/conll.hpp"
#include "ggparse/decoder.hpp"
#include "ggparse/eval.hpp"
#include "ggparse/model.hpp"
#include "ggparse/scorer.hpp"
#include "ggparse/scores_io.hpp"
#include "ggparse/synthetic.hpp"
#include "ggparse/training.hpp"
#include "ggparse/tree.hpp"

namespace {

using namespace ggparse;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitModel = 3;
constexpr int kExitData = 4;

int log_level() {
    const char* v = std::getenv("GGPARSE_LOG");
    if (!v) return 1;
    try {
        return std::stoi(v);
    } catch (...) {
        return 1;
    }
}

void info(const std::string& msg) {
    if (log_level() >= 1) std::cerr << "[ggparse] " << msg << "\n";
}

DecoderKind parse_decoder(const std::string& name) {
    if (name == "greedy-projective") return DecoderKind::kGreedyProjective;
    if (name == "greedy-nonprojective") return DecoderKind::kGreedyNonProjective;
    if (name == "mst") return DecoderKind::kMst;
    throw ConfigError("unknown decoder '" + name + "'");
}

ConllFormat parse_format(const std::string& name) {
    if (name == "conllx") return ConllFormat::kConllX;
    if (name == "conllu") return ConllFormat::kConllU;
    throw ConfigError("unknown treebank format '" + name + "'");
}

PunctConvention parse_convention(const std::string& name) {
    if (name == "ud") return PunctConvention::kUd;
    if (name == "ptb") return PunctConvention::kPtb;
    throw ConfigError("unknown punctuation convention '" + name + "'");
}

// --key=value leftovers become config overrides
void apply_extras(Config& cfg, const std::vector<std::string>& extras) {
    for (const std::string& e : extras) {
        if (e.rfind("--", 0) != 0)
            throw ConfigError("unexpected argument '" + e + "'");
        std::size_t eq = e.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected --key=value, got '" + e + "'");
        cfg.set(e.substr(2, eq - 2), e.substr(eq + 1));
    }
}

Config make_config(const std::string& config_path, const std::vector<std::string>& extras,
                   long long seed_flag) {
    Config cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    apply_extras(cfg, extras);
    if (seed_flag >= 0) cfg.seed = static_cast<unsigned long long>(seed_flag);
    return cfg;
}

DecodeOptions decode_options(const Config& cfg) {
    DecodeOptions opts;
    opts.order_on_raw = cfg.order_offset_on_raw;
    opts.mst_on_prob = cfg.mst_on_prob;
    opts.np_tie_by_confidence = cfg.np_tie_by_confidence;
    return opts;
}

struct ParsedCorpus {
    std::vector<DepTree> trees;
    std::vector<std::vector<int>> pred_layers;
    std::vector<ScoreSet> scores;
};

ParsedCorpus parse_corpus(const Model& model, const std::vector<Sentence>& sentences,
                          DecoderKind kind, int jobs, bool keep_scores) {
    ParsedCorpus out;
    out.trees.resize(sentences.size());
    out.pred_layers.resize(sentences.size());
    if (keep_scores) out.scores.resize(sentences.size());
    DecodeOptions opts = decode_options(model.cfg);
    auto work = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            ScoreSet ss = score_sentence(sentences[i], model);
            DepTree t = decode(kind, ss, sentences[i].size(), nullptr, opts);
            assign_labels(ss, t, model.vocab.label_names);
            std::vector<int> pl;
            for (int d = 1; d <= sentences[i].size(); ++d)
                pl.push_back(order_priority(ss, d));
            out.trees[i] = std::move(t);
            out.pred_layers[i] = std::move(pl);
            if (keep_scores) out.scores[i] = std::move(ss);
        }
    };
    if (jobs <= 1) {
        work(0, sentences.size());
    } else {
        std::vector<std::thread> threads;
        std::size_t chunk = (sentences.size() + jobs - 1) / jobs;
        for (int j = 0; j < jobs; ++j) {
            std::size_t lo = j * chunk, hi = std::min(sentences.size(), lo + chunk);
            if (lo < hi) threads.emplace_back(work, lo, hi);
        }
        for (auto& t : threads) t.join();
    }
    return out;
}

int cmd_train(const Config& cfg, const std::string& train_path,
              const std::string& dev_path, const std::string& model_path,
              const std::string& format_name, const std::string& decoder_name,
              const std::string& log_path) {
    auto format = parse_format(format_name);
    auto train_set = read_conll(train_path, format);
    if (train_set.empty()) throw FormatError("training file " + train_path + " is empty");
    std::vector<Sentence> dev_set;
    if (!dev_path.empty()) dev_set = read_conll(dev_path, format);
    info("training on " + std::to_string(train_set.size()) + " sentences");
    TrainResult res =
        train(cfg, train_set, dev_set, parse_decoder(decoder_name), &std::cerr);
    save_model(res.model, model_path);
    info("saved best-dev checkpoint to " + model_path);
    if (!log_path.empty()) {
        std::ofstream lf(log_path);
        for (const auto& el : res.log)
            lf << "epoch " << el.epoch << ": loss " << el.l_arc << "/" << el.l_rel << "/"
               << el.l_order << ", dev UAS " << 100 * el.dev_uas << " LAS "
               << 100 * el.dev_las << " OrderAcc " << 100 * el.dev_order_acc << ", lr "
               << el.lr << "\n";
    }
    return kExitOk;
}

int cmd_parse(const std::string& model_path, const std::string& input_path,
              const std::string& output_path, const std::string& format_name,
              const std::string& decoder_name, const std::string& scores_out, int jobs) {
    Model model = load_model(model_path);
    auto format = parse_format(format_name);
    auto sentences = read_conll(input_path, format);
    ParsedCorpus pc = parse_corpus(model, sentences, parse_decoder(decoder_name), jobs,
                                   !scores_out.empty());
    write_conll(sentences, pc.trees, output_path, format);
    if (!scores_out.empty()) write_scores(pc.scores, scores_out);
    info("parsed " + std::to_string(sentences.size()) + " sentences to " + output_path);
    return kExitOk;
}

int cmd_evaluate(const std::string& gold_path, const std::string& pred_path,
                 const std::string& format_name, const std::string& convention_name,
                 const std::string& report_format, bool strict_root) {
    auto format = parse_format(format_name);
    auto gold = read_conll(gold_path, format);
    auto pred_sents = read_conll(pred_path, format);
    if (gold.size() != pred_sents.size())
        throw std::invalid_argument("gold and predicted corpora have different sizes");
    std::vector<DepTree> pred;
    for (const auto& s : pred_sents) pred.push_back(gold_tree(s));
    EvalReport rep = attachment_scores(gold, pred, parse_convention(convention_name));

    // order accuracy from tree depths; invalid predicted trees count as wrong
    std::vector<LayerAssignment> gl;
    std::vector<std::vector<int>> pl;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        gl.push_back(compute_layers(gold_tree(gold[i])));
        DepTree pt = pred[i];
        if (validate_tree(pt).valid) {
            pl.push_back(compute_layers(pt).layers);
        } else {
            pl.push_back(std::vector<int>(pt.n, -1));
        }
    }
    rep.order_acc = order_accuracy(gl, pl);
    if (!strict_root) rep.multi_root_sentences = 0;
    std::cout << format_report(rep, report_format == "kv");
    return kExitOk;
}

int cmd_oracle_check(const std::string& gold_path, const std::string& format_name,
                     const std::string& decoder_name) {
    auto format = parse_format(format_name);
    auto gold = read_conll(gold_path, format);
    DecoderKind kind = parse_decoder(decoder_name);
    long ok = 0, failed = 0, unreachable = 0;
    long ablation_ok = 0;
    std::vector<std::string> failures;
    for (const auto& s : gold) {
        DepTree t = gold_tree(s);
        auto v = validate_tree(t);
        if (!v.valid) {
            failures.push_back(s.source_id + " (invalid gold: " + v.reason + ")");
            ++failed;
            continue;
        }
        bool projective = is_projective(t);
        if (kind == DecoderKind::kGreedyProjective && !projective) {
            ++unreachable;
            continue;
        }
        ScoreSet ss = oracle_scores(t);
        DepTree dec = decode(kind, ss, t.n, nullptr, DecodeOptions{});
        if (dec.heads == t.heads) {
            ++ok;
        } else {
            ++failed;
            failures.push_back(s.source_id);
        }
        DecodeOptions ablate;
        ablate.use_order = false;
        DepTree dec2 = decode(kind, ss, t.n, nullptr, ablate);
        if (dec2.heads == t.heads) ++ablation_ok;
    }
    long reachable = ok + failed;
    std::cout << "oracle reconstruction: " << ok << "/" << reachable << " sentences";
    if (unreachable)
        std::cout << " (" << unreachable << " non-projective, skipped as unreachable)";
    std::cout << "\n";
    std::cout << "arc-only ablation reconstruction: " << ablation_ok << "/" << reachable
              << "\n";
    for (const auto& f : failures) std::cout << "FAIL " << f << "\n";
    std::cout << (failed == 0 ? "PASS" : "FAIL") << "\n";
    return kExitOk;
}

int cmd_bench(const Config& cfg, const std::string& model_path,
              const std::string& input_path, const std::string& format_name,
              const std::string& decoder_name, const std::string& lengths_arg,
              int repetitions, int jobs) {
    if (repetitions < 3) throw ConfigError("--repetitions must be at least 3");
    std::vector<Sentence> sentences;
    Model model;
    if (!model_path.empty() && !input_path.empty()) {
        model = load_model(model_path);
        sentences = read_conll(input_path, parse_format(format_name));
    } else {
        // synthetic mode: fixed lengths, small model trained on nothing
        std::vector<int> lengths;
        std::stringstream ls(lengths_arg);
        std::string item;
        while (std::getline(ls, item, ',')) lengths.push_back(std::stoi(item));
        std::mt19937_64 rng(cfg.seed);
        int id = 0;
        for (int len : lengths)
            for (int k = 0; k < 8; ++k)
                sentences.push_back(
                    synthetic_sentence(random_projective_tree(len, rng), id++, rng));
        Config small = cfg;
        small.min_word_freq = 1;
        Vocab vocab = build_vocab(sentences, 1);
        model = init_model(small, vocab, rng);
    }
    BenchResult res = benchmark_decode(model, sentences, parse_decoder(decoder_name),
                                       repetitions, jobs);
    std::cout << format_bench(res);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Global greedy dependency parser"};
    app.require_subcommand(1);

    std::string config_path, train_path, dev_path, test_path, model_path, output_path;
    std::string decoder_name = "greedy-projective";
    std::string format_name = "conllu";
    std::string convention_name = "ud";
    std::string report_format = "table";
    std::string scores_out, pred_path, lengths_arg = "10,20,40", log_path;
    long long seed_flag = -1;
    int jobs = 1, repetitions = 3;
    bool strict_root = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "key=value config file");
        sub->add_option("--seed", seed_flag, "random seed override");
        sub->add_option("--format", format_name, "treebank format: conllx|conllu");
        sub->allow_extras();  // --key=value config overrides
    };

    CLI::App* train_cmd = app.add_subcommand("train", "train a model");
    train_cmd->add_option("--train", train_path, "training treebank")->required();
    train_cmd->add_option("--dev", dev_path, "development treebank");
    train_cmd->add_option("--model", model_path, "checkpoint output path")->required();
    train_cmd->add_option("--decoder", decoder_name, "dev-eval decoder");
    train_cmd->add_option("--output", log_path, "metric log output path");
    add_common(train_cmd);

    CLI::App* parse_cmd = app.add_subcommand("parse", "parse a treebank file");
    parse_cmd->add_option("--model", model_path, "model checkpoint")->required();
    parse_cmd->add_option("--test", test_path, "input treebank")->required();
    parse_cmd->add_option("--output", output_path, "output file")->required();
    parse_cmd->add_option("--decoder", decoder_name,
                          "greedy-projective|greedy-nonprojective|mst");
    parse_cmd->add_option("--scores-out", scores_out, "dump score matrices");
    parse_cmd->add_option("--jobs", jobs, "sentence-level parallelism");
    add_common(parse_cmd);

    CLI::App* eval_cmd = app.add_subcommand("evaluate", "score predictions against gold");
    eval_cmd->add_option("--test", test_path, "gold treebank")->required();
    eval_cmd->add_option("--pred", pred_path, "predicted treebank")->required();
    eval_cmd->add_option("--convention", convention_name, "punctuation: ud|ptb");
    eval_cmd->add_option("--report-format", report_format, "table|kv");
    eval_cmd->add_flag("--strict-root", strict_root, "report multi-root sentences");
    add_common(eval_cmd);

    CLI::App* oracle_cmd =
        app.add_subcommand("oracle-check", "verify oracle-score reconstruction");
    oracle_cmd->add_option("--test", test_path, "gold treebank")->required();
    oracle_cmd->add_option("--decoder", decoder_name, "decoder to check");
    add_common(oracle_cmd);

    CLI::App* bench_cmd = app.add_subcommand("bench", "decoding scaling table");
    bench_cmd->add_option("--model", model_path, "model checkpoint");
    bench_cmd->add_option("--test", test_path, "input treebank");
    bench_cmd->add_option("--decoder", decoder_name, "decoder to benchmark");
    bench_cmd->add_option("--lengths", lengths_arg, "synthetic sentence lengths");
    bench_cmd->add_option("--repetitions", repetitions, "timing repetitions (>= 3)");
    bench_cmd->add_option("--jobs", jobs, "sentence-level parallelism");
    add_common(bench_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        Config cfg = make_config(config_path, sub->remaining(), seed_flag);
        if (sub == train_cmd)
            return cmd_train(cfg, train_path, dev_path, model_path, format_name,
                             decoder_name, log_path);
        if (sub == parse_cmd)
            return cmd_parse(model_path, test_path, output_path, format_name,
                             decoder_name, scores_out, jobs);
        if (sub == eval_cmd)
            return cmd_evaluate(test_path, pred_path, format_name, convention_name,
                                report_format, strict_root);
        if (sub == oracle_cmd)
            return cmd_oracle_check(test_path, format_name, decoder_name);
        if (sub == bench_cmd)
            return cmd_bench(cfg, model_path, test_path, format_name, decoder_name,
                             lengths_arg, repetitions, jobs);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ModelError& e) {
        std::cerr << "model error: " << e.what() << "\n";
        return kExitModel;
    } catch (const FormatError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitConfig;
}
