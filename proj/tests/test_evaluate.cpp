#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <tuple>

#include "glfm/evaluate.hpp"
#include "glfm/simbench.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace glfm;

namespace {

std::string temp_file(const std::string& name, const std::string& content) {
    const std::string path = "glfm_eval_" + name;
    std::ofstream(path) << content;
    return path;
}

bool lex_less(const Entry& a, const Entry& b) { return std::tie(a.i, a.j, a.y) < std::tie(b.i, b.j, b.y); }

}  // namespace

TEST_CASE("holdout split partitions the entries") {
    const Matrix m = oracle::random_matrix(50, 20, 1);
    const auto data = oracle::random_data(m, oracle::mixed_families(20), 1.0, 2);
    REQUIRE(data.size() == 1000);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        RandomStream rng(seed);
        const auto split = holdout_split(data, 0.2, rng);
        CHECK(split.test.size() >= 150);
        CHECK(split.test.size() <= 250);
        CHECK(split.train.size() + split.test.size() == 1000);
        std::vector<Entry> all(split.train.entries().begin(), split.train.entries().end());
        all.insert(all.end(), split.test.entries().begin(), split.test.entries().end());
        std::sort(all.begin(), all.end(), lex_less);
        std::vector<Entry> src(data.entries().begin(), data.entries().end());
        std::sort(src.begin(), src.end(), lex_less);
        CHECK(all == src);
        for (Index i = 0; i < 50; ++i) CHECK(split.train.row_count(i) >= 1);
        for (Index j = 0; j < 20; ++j) CHECK(split.train.col_count(j) >= 1);
        CHECK(split.fraction == 0.2);
    }
    RandomStream a(5), b(5);
    CHECK(holdout_split(data, 0.2, a).test.checksum() == holdout_split(data, 0.2, b).test.checksum());
}

TEST_CASE("holdout split keeps sparse rows in training") {
    // row 0 and column 0 have one entry each: it can never move to test
    std::vector<Entry> e = {{0, 0, 1.0}};
    for (Index i = 1; i < 10; ++i)
        for (Index j = 1; j < 10; ++j) e.push_back({i, j, 0.5});
    const auto data = ObservedMatrix::uniform(10, 10, Family::normal(), std::move(e));
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        RandomStream rng(seed);
        const auto split = holdout_split(data, 0.3, rng);
        CHECK(split.train.row_count(0) == 1);
        CHECK(split.test.size() == 25);
    }
}

TEST_CASE("holdout split errors") {
    const auto diag = ObservedMatrix::uniform(3, 3, Family::normal(), {{0, 0, 1.0}, {1, 1, 1.0}, {2, 2, 1.0}});
    RandomStream rng(1);
    CHECK_THROWS_AS(holdout_split(diag, 0.5, rng), std::runtime_error);
    CHECK_THROWS_AS(holdout_split(diag, 0.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(holdout_split(diag, 1.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(holdout_split(ObservedMatrix::uniform(2, 2, Family::normal(), {}), 0.2, rng),
                    std::invalid_argument);
}

TEST_CASE("test log-likelihood") {
    CHECK(test_loglik(Matrix::Zero(2, 2), ObservedMatrix::uniform(2, 2, Family::normal(), {})) == 0.0);
    const auto one = ObservedMatrix::uniform(1, 1, Family::binomial(1), {{0, 0, 1.0}});
    CHECK(test_loglik(Matrix::Zero(1, 1), one) == doctest::Approx(std::log(0.5)).epsilon(1e-14));

    const Matrix m = oracle::random_matrix(20, 12, 3);
    const auto data = oracle::random_data(m, oracle::mixed_families(12), 0.7, 4);
    double loop = 0.0;
    for (const auto& e : data.entries()) loop += log_density(data.family(e.j), e.y, m(e.i, e.j));
    CHECK(test_loglik(m, data) == loop);
    CHECK_THROWS_AS(test_loglik(Matrix::Zero(3, 3), data), std::invalid_argument);
}

TEST_CASE("test log-likelihood is additive over disjoint sets") {
    const Matrix m = oracle::random_matrix(30, 10, 5);
    const auto data = oracle::random_data(m, std::vector<Family>(10, Family::binomial(4)), 0.6, 6);
    RandomStream rng(7);
    const auto split = holdout_split(data, 0.4, rng);
    // summing in row-major order over the union reproduces the parts exactly
    double a = 0.0, b = 0.0;
    for (const auto& e : split.train.entries()) a += log_density(data.family(e.j), e.y, m(e.i, e.j));
    for (const auto& e : split.test.entries()) b += log_density(data.family(e.j), e.y, m(e.i, e.j));
    CHECK(test_loglik(m, split.train) == a);
    CHECK(test_loglik(m, split.test) == b);
    CHECK(std::abs(test_loglik(m, data) - (a + b)) <= 1e-12 * std::abs(a + b));
}

TEST_CASE("truth scores higher than a perturbed signal") {
    const SimSetting s = setting_by_id(19).scaled(0.25);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        RandomStream truth_rng(seed);
        const Matrix m = generate_truth(s, truth_rng).second;
        const auto data = generate_observation(m, s, RandomStream(seed + 100));
        const Matrix bumped = m + 2.0 * oracle::random_matrix(s.n, s.p, static_cast<unsigned>(seed)).cwiseSign();
        CHECK(test_loglik(m, data) > test_loglik(bumped, data));
    }
}

TEST_CASE("MovieLens ingestion") {
    const std::string good = temp_file("good.data", "196\t242\t3\t881250949\n186\t302\t3\t891717742\n\n22\t377\t1\t878887116\n");
    const auto data = ingest_movielens(good);
    CHECK(data.rows() == 196);
    CHECK(data.cols() == 377);
    CHECK(data.size() == 3);
    CHECK(data.family(0) == Family::binomial(4));
    bool found = false;
    for (const auto& e : data.entries()) found |= (e == Entry{195, 241, 2.0});
    CHECK(found);

    const std::string dup = temp_file("dup.data", "1\t1\t3\t0\n1\t1\t4\t1\n");
    CHECK_THROWS_AS(ingest_movielens(dup), std::invalid_argument);
    const std::string range = temp_file("range.data", "1\t1\t6\t0\n");
    CHECK_THROWS_AS(ingest_movielens(range), std::invalid_argument);
    const std::string bad = temp_file("bad.data", "1\tx\t3\t0\n");
    CHECK_THROWS_AS(ingest_movielens(bad), std::invalid_argument);
    CHECK_THROWS_AS(ingest_movielens("/nonexistent/u.data"), std::ios_base::failure);
    for (const auto& p : {good, dup, range, bad}) std::remove(p.c_str());
}

TEST_CASE("evaluation record") {
    const SimSetting s = setting_by_id(1).scaled(0.2);
    RandomStream truth_rng(1);
    const auto data = generate_observation(generate_truth(s, truth_rng).second, s, RandomStream(2));
    PipelineConfig cfg;
    cfg.rank = 3;
    const auto rec = evaluate_procedure(data, 0.2, procedure_from_id(6), cfg, 11);
    CHECK(rec.procedure == "cjmle+1");
    CHECK(rec.rank == 3);
    CHECK(rec.seed == 11);
    CHECK(rec.wall_ms == 0);
    CHECK(rec.test_ll < 0.0);
    CHECK(rec.train_ll < 0.0);
    const auto again = evaluate_procedure(data, 0.2, procedure_from_id(6), cfg, 11);
    CHECK(again.to_json() == rec.to_json());

    const auto j = nlohmann::json::parse(rec.to_json());
    CHECK(j.at("procedure") == "cjmle+1");
    CHECK(j.at("test_ll").get<double>() == rec.test_ll);
    CHECK(j.size() == 6);
}
