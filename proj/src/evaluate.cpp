#include "glfm/evaluate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace glfm {

HoldoutSplit holdout_split(const ObservedMatrix& data, double test_fraction, RandomStream& rng) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw std::invalid_argument("test fraction must lie in (0, 1)");
    if (data.empty()) throw std::invalid_argument("cannot split an empty data set");

    const auto entries = data.entries();
    const std::size_t target =
        static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(entries.size())));

    std::vector<std::size_t> order(entries.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng.engine());

    std::vector<std::size_t> row_left(static_cast<std::size_t>(data.rows()));
    std::vector<std::size_t> col_left(static_cast<std::size_t>(data.cols()));
    for (Index i = 0; i < data.rows(); ++i) row_left[static_cast<std::size_t>(i)] = data.row_count(i);
    for (Index j = 0; j < data.cols(); ++j) col_left[static_cast<std::size_t>(j)] = data.col_count(j);

    std::vector<bool> in_test(entries.size(), false);
    std::size_t moved = 0;
    for (std::size_t k = 0; k < order.size() && moved < target; ++k) {
        const Entry& e = entries[order[k]];
        auto& rl = row_left[static_cast<std::size_t>(e.i)];
        auto& cl = col_left[static_cast<std::size_t>(e.j)];
        if (rl <= 1 || cl <= 1) continue;
        --rl;
        --cl;
        in_test[order[k]] = true;
        ++moved;
    }
    if (moved < target)
        throw std::runtime_error("cannot hold out " + std::to_string(target) +
                                 " entries without emptying a training row or column");

    std::vector<Entry> train, test;
    for (std::size_t k = 0; k < entries.size(); ++k) (in_test[k] ? test : train).push_back(entries[k]);
    std::vector<Family> fams(data.families().begin(), data.families().end());
    return {ObservedMatrix(data.rows(), data.cols(), fams, std::move(train)),
            ObservedMatrix(data.rows(), data.cols(), fams, std::move(test)), test_fraction};
}

double test_loglik(const Matrix& m_hat, const ObservedMatrix& test) {
    if (m_hat.rows() != test.rows() || m_hat.cols() != test.cols())
        throw std::invalid_argument("signal matrix shape does not match test data");
    double s = 0.0;
    for (const auto& e : test.entries()) s += log_density(test.family(e.j), e.y, m_hat(e.i, e.j));
    return s;
}

ObservedMatrix ingest_movielens(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open " + path);
    std::vector<Entry> entries;
    Index n = 0, p = 0;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ss(line);
        long long user = 0, item = 0, ts = 0;
        double rating = 0.0;
        if (!(ss >> user >> item >> rating >> ts) || user < 1 || item < 1)
            throw std::invalid_argument("line " + std::to_string(lineno) + ": malformed rating record");
        if (rating < 1.0 || rating > 5.0 || std::floor(rating) != rating)
            throw std::invalid_argument("line " + std::to_string(lineno) + ": rating outside 1-5");
        entries.push_back({static_cast<Index>(user - 1), static_cast<Index>(item - 1), rating - 1.0});
        n = std::max<Index>(n, user);
        p = std::max<Index>(p, item);
    }
    return ObservedMatrix::uniform(n, p, Family::binomial(4), std::move(entries));
}

std::string EvalRecord::to_json() const {
    nlohmann::ordered_json j;
    j["train_ll"] = train_ll;
    j["test_ll"] = test_ll;
    j["rank"] = rank;
    j["procedure"] = procedure;
    j["seed"] = seed;
    j["wall_ms"] = wall_ms;
    return j.dump();
}

EvalRecord evaluate_procedure(const ObservedMatrix& data, double test_fraction, Procedure proc,
                              const PipelineConfig& cfg, std::uint64_t seed, bool record_timing) {
    const auto t0 = std::chrono::steady_clock::now();
    const RandomStream root(seed);
    RandomStream holdout_rng = root.derive(stream_role::holdout);
    const HoldoutSplit split = holdout_split(data, test_fraction, holdout_rng);
    const Matrix fit = run_procedure(split.train, proc, cfg, root.derive(stream_role::split));

    EvalRecord rec;
    rec.train_ll = test_loglik(fit, split.train);
    rec.test_ll = test_loglik(fit, split.test);
    rec.rank = cfg.rank;
    rec.procedure = to_string(proc.initial) + "+" + to_string(proc.refine);
    rec.seed = seed;
    if (record_timing)
        rec.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

}  // namespace glfm
