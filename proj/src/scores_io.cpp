#include "ggparse/scores_io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ggparse {

namespace {
constexpr char kHeader[] = "#ggparse-scores v1";
}

std::string format_scores(const std::vector<ScoreSet>& sets) {
    std::ostringstream os;
    os << std::setprecision(std::numeric_limits<double>::max_digits10);
    os << kHeader << '\n';
    for (const ScoreSet& ss : sets) {
        os << "sent " << ss.n << ' ' << ss.num_labels() << '\n';
        for (int h = 0; h <= ss.n; ++h) {
            for (int d = 0; d <= ss.n; ++d) os << (d ? " " : "") << ss.arc(h, d);
            os << '\n';
        }
        for (int d = 1; d <= ss.n; ++d) {
            for (int k = 0; k < kOrderClasses; ++k)
                os << (k ? " " : "") << ss.order_logits(d - 1, k);
            os << '\n';
        }
        if (ss.has_labels()) {
            for (int h = 0; h <= ss.n; ++h)
                for (int d = 1; d <= ss.n; ++d) {
                    for (int r = 0; r < ss.num_labels(); ++r)
                        os << (r ? " " : "") << ss.label[d - 1](h, r);
                    os << '\n';
                }
        }
        os << '\n';
    }
    return os.str();
}

void write_scores(const std::vector<ScoreSet>& sets, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << format_scores(sets);
}

std::vector<ScoreSet> parse_scores(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kHeader)
        throw std::runtime_error("score file: missing header line");
    std::vector<ScoreSet> sets;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream hs(line);
        std::string tag;
        int n = 0, L = 0;
        if (!(hs >> tag >> n >> L) || tag != "sent")
            throw std::runtime_error("score file: expected 'sent n L' line");
        ScoreSet ss;
        ss.n = n;
        ss.arc.resize(n + 1, n + 1);
        auto read_row = [&](auto&& fill, int count) {
            if (!std::getline(in, line))
                throw std::runtime_error("score file: truncated block");
            std::istringstream rs(line);
            for (int i = 0; i < count; ++i) {
                double v;
                if (!(rs >> v)) throw std::runtime_error("score file: short row");
                fill(i, v);
            }
        };
        for (int h = 0; h <= n; ++h)
            read_row([&](int d, double v) { ss.arc(h, d) = v; }, n + 1);
        ss.arc_prob = ss.arc.unaryExpr([](double x) { return 1.0 / (1.0 + std::exp(-x)); });
        ss.order_logits.resize(n, kOrderClasses);
        for (int d = 1; d <= n; ++d)
            read_row([&](int k, double v) { ss.order_logits(d - 1, k) = v; },
                     kOrderClasses);
        if (L > 0) {
            ss.label.assign(n, Eigen::MatrixXd(n + 1, L));
            for (int h = 0; h <= n; ++h)
                for (int d = 1; d <= n; ++d)
                    read_row([&, h, d](int r, double v) { ss.label[d - 1](h, r) = v; }, L);
        }
        sets.push_back(std::move(ss));
    }
    return sets;
}

std::vector<ScoreSet> read_scores(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open score file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scores(buf.str());
}

}  // namespace ggparse
