#pragma once

#include <cstdint>
#include <string>

#include "glfm/observed.hpp"
#include "glfm/pipeline.hpp"
#include "glfm/random.hpp"

namespace glfm {

struct HoldoutSplit {
    ObservedMatrix train;
    ObservedMatrix test;
    double fraction = 0.0;
};

// Moves round(test_fraction * |entries|) uniformly chosen entries to the test
// set. An entry whose move would leave its training row or column empty stays
// in training and the next candidate is drawn instead. Throws
// std::runtime_error when the requested size cannot be reached that way.
HoldoutSplit holdout_split(const ObservedMatrix& data, double test_fraction, RandomStream& rng);

// Sum of full log-densities (base-measure terms included) over the entries.
double test_loglik(const Matrix& m_hat, const ObservedMatrix& test);

// MovieLens-100K `u.data`: user, item, rating 1-5, timestamp per line.
// Users become rows, items columns, y = rating - 1 under Binomial(4).
ObservedMatrix ingest_movielens(const std::string& path);

struct EvalRecord {
    double train_ll = 0.0;
    double test_ll = 0.0;
    Index rank = 0;
    std::string procedure;  // e.g. "cjmle+2prime"
    std::uint64_t seed = 0;
    std::int64_t wall_ms = 0;

    std::string to_json() const;
};

// Split with rng.derive(stream_role::holdout), fit on train, score both sets.
// Refinement splits use rng.derive(stream_role::split).
EvalRecord evaluate_procedure(const ObservedMatrix& data, double test_fraction, Procedure proc,
                              const PipelineConfig& cfg, std::uint64_t seed, bool record_timing = false);

}  // namespace glfm
