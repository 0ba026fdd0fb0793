#pragma once

// Simulation settings, data generation and the replication driver.
//
// Factors are drawn i.i.d. Uniform[-0.9, 0.9], M* = theta* a*^T, each entry
// is observed with probability pi, ordinal columns are Binomial(5) and
// continuous columns Normal(m*, 1).

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "glfm/matrix_ops.hpp"
#include "glfm/pipeline.hpp"
#include "glfm/random.hpp"

namespace glfm {

enum class Layout { AllOrdinal, HalfOrdinalHalfContinuous };

struct SimSetting {
    int id = 0;
    Index n = 0;
    Index p = 0;
    Index rank = 0;
    double pi = 0.0;
    Layout layout = Layout::AllOrdinal;
    int trials = 5;

    // First half of the columns ordinal, the rest continuous, for the mixed layout.
    std::vector<Family> families() const;
    // n and p multiplied by `factor` (rounded, at least 2 and rank + 1).
    SimSetting scaled(double factor) const;
};

std::vector<SimSetting> settings_registry();
// Throws std::out_of_range for ids outside 1..24.
SimSetting setting_by_id(int id);

std::pair<FactorPair, Matrix> generate_truth(const SimSetting& s, RandomStream& rng);

// Mask and noise come from rng.derive(stream_role::mask) and
// rng.derive(stream_role::noise).
ObservedMatrix generate_observation(const Matrix& m_star, const SimSetting& s, const RandomStream& rng);

struct RunResult {
    int setting_id = 0;
    int procedure_id = 0;
    int replication = 0;
    std::uint64_t seed = 0;
    double frob_scaled = 0.0;
    double max_norm = 0.0;
    std::int64_t wall_ms = 0;
    std::string status = "ok";
    std::uint64_t data_checksum = 0;
};

struct BenchOptions {
    PipelineConfig pipeline;  // rank is taken from the setting
    bool record_timing = false;
};

// Seed of replication `rep`: derived from (base_seed, setting id, rep).
std::uint64_t replication_seed(std::uint64_t base_seed, int setting_id, int rep);

// Results ordered by (procedure, replication). A failing procedure yields a
// row with status "failed" and NaN losses.
std::vector<RunResult> run_procedures(const SimSetting& s, const std::vector<int>& procedures, int reps,
                                      std::uint64_t base_seed, const BenchOptions& opts = {});

inline constexpr const char* kRunResultHeader = "setting,procedure,rep,seed,frob_scaled,max_norm,wall_ms,status";
void write_results_csv(std::ostream& out, const std::vector<RunResult>& rows, bool header = true);

}  // namespace glfm
