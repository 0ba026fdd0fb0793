#include "glfm/simbench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace glfm {

std::vector<Family> SimSetting::families() const {
    std::vector<Family> f(static_cast<std::size_t>(p), Family::binomial(trials));
    if (layout == Layout::HalfOrdinalHalfContinuous)
        for (Index j = p / 2; j < p; ++j) f[static_cast<std::size_t>(j)] = Family::normal();
    return f;
}

SimSetting SimSetting::scaled(double factor) const {
    if (!(factor > 0.0)) throw std::invalid_argument("scale factor must be positive");
    SimSetting s = *this;
    const Index floor_dim = std::max<Index>(2, rank + 1);
    s.n = std::max(floor_dim, static_cast<Index>(std::llround(static_cast<double>(n) * factor)));
    s.p = std::max(floor_dim, static_cast<Index>(std::llround(static_cast<double>(p) * factor)));
    return s;
}

std::vector<SimSetting> settings_registry() {
    std::vector<SimSetting> out;
    const Index dims[3][2] = {{400, 200}, {800, 400}, {1600, 800}};
    const double pis[2] = {0.6, 0.2};
    const Layout layouts[2] = {Layout::AllOrdinal, Layout::HalfOrdinalHalfContinuous};
    const Index ranks[2] = {3, 5};
    // Settings 1-12 use r = 3, 13-24 r = 5; within each, layout, then pi, then size.
    int id = 1;
    for (Index r : ranks)
        for (Layout layout : layouts)
            for (double pi : pis)
                for (const auto& d : dims) out.push_back({id++, d[0], d[1], r, pi, layout, 5});
    return out;
}

SimSetting setting_by_id(int id) {
    if (id < 1 || id > 24) throw std::out_of_range("unknown simulation setting " + std::to_string(id));
    return settings_registry()[static_cast<std::size_t>(id - 1)];
}

std::pair<FactorPair, Matrix> generate_truth(const SimSetting& s, RandomStream& rng) {
    FactorPair f{Matrix(s.n, s.rank), Matrix(s.p, s.rank)};
    for (Index i = 0; i < s.n; ++i)
        for (Index k = 0; k < s.rank; ++k) f.theta(i, k) = rng.uniform(-0.9, 0.9);
    for (Index j = 0; j < s.p; ++j)
        for (Index k = 0; k < s.rank; ++k) f.a(j, k) = rng.uniform(-0.9, 0.9);
    Matrix m = f.product();
    return {std::move(f), std::move(m)};
}

ObservedMatrix generate_observation(const Matrix& m_star, const SimSetting& s, const RandomStream& rng) {
    if (m_star.rows() != s.n || m_star.cols() != s.p)
        throw std::invalid_argument("signal matrix does not match the setting's dimensions");
    RandomStream mask = rng.derive(stream_role::mask);
    RandomStream noise = rng.derive(stream_role::noise);
    const auto fams = s.families();
    std::vector<Entry> entries;
    entries.reserve(static_cast<std::size_t>(static_cast<double>(s.n * s.p) * s.pi * 1.1) + 16);
    for (Index i = 0; i < s.n; ++i) {
        for (Index j = 0; j < s.p; ++j) {
            if (!mask.bernoulli(s.pi)) continue;
            entries.push_back({i, j, sample(fams[static_cast<std::size_t>(j)], m_star(i, j), noise)});
        }
    }
    return ObservedMatrix(s.n, s.p, fams, std::move(entries));
}

std::uint64_t replication_seed(std::uint64_t base_seed, int setting_id, int rep) {
    return derive_seed(base_seed, {static_cast<std::uint64_t>(setting_id), static_cast<std::uint64_t>(rep)});
}

std::vector<RunResult> run_procedures(const SimSetting& s, const std::vector<int>& procedures, int reps,
                                      std::uint64_t base_seed, const BenchOptions& opts) {
    if (reps < 1) throw std::invalid_argument("reps must be at least 1");
    for (int id : procedures) procedure_from_id(id);

    using Clock = std::chrono::steady_clock;
    auto elapsed_ms = [](Clock::time_point t0) {
        return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0).count();
    };

    PipelineConfig cfg = opts.pipeline;
    cfg.rank = s.rank;

    std::vector<RunResult> out;
    for (int rep = 0; rep < reps; ++rep) {
        const std::uint64_t seed = replication_seed(base_seed, s.id, rep);
        const RandomStream root(seed);
        RandomStream truth_rng = root.derive(stream_role::truth);
        const auto [factors, m_star] = generate_truth(s, truth_rng);
        const ObservedMatrix data = generate_observation(m_star, s, root);
        const RandomStream split_rng = root.derive(stream_role::split);

        // Full-data initial fits are shared by the procedures that refine them.
        std::map<InitialKind, std::pair<Matrix, std::int64_t>> initial_cache;

        for (int id : procedures) {
            RunResult row;
            row.setting_id = s.id;
            row.procedure_id = id;
            row.replication = rep;
            row.seed = seed;
            row.data_checksum = data.checksum();
            const Procedure proc = procedure_from_id(id);
            const auto t0 = Clock::now();
            try {
                Matrix est;
                std::int64_t extra_ms = 0;
                if (proc.refine == RefineKind::None || proc.refine == RefineKind::NoSplit) {
                    auto it = initial_cache.find(proc.initial);
                    if (it == initial_cache.end()) {
                        const auto ti = Clock::now();
                        Matrix fit = fit_initial(data, proc.initial, cfg);
                        it = initial_cache.emplace(proc.initial, std::make_pair(std::move(fit), elapsed_ms(ti))).first;
                    } else {
                        extra_ms = it->second.second;
                    }
                    est = run_procedure(data, proc, cfg, split_rng, &it->second.first);
                } else {
                    est = run_procedure(data, proc, cfg, split_rng);
                }
                row.frob_scaled = scaled_frobenius_error(est, m_star);
                row.max_norm = max_norm_error(est, m_star);
                if (opts.record_timing) row.wall_ms = elapsed_ms(t0) + extra_ms;
            } catch (const std::exception&) {
                row.status = "failed";
                row.frob_scaled = std::numeric_limits<double>::quiet_NaN();
                row.max_norm = std::numeric_limits<double>::quiet_NaN();
                if (opts.record_timing) row.wall_ms = elapsed_ms(t0);
            }
            out.push_back(row);
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const RunResult& a, const RunResult& b) {
        if (a.setting_id != b.setting_id) return a.setting_id < b.setting_id;
        if (a.procedure_id != b.procedure_id) return a.procedure_id < b.procedure_id;
        return a.replication < b.replication;
    });
    return out;
}

void write_results_csv(std::ostream& out, const std::vector<RunResult>& rows, bool header) {
    if (header) out << kRunResultHeader << '\n';
    std::ostringstream line;
    line.precision(17);
    for (const auto& r : rows) {
        line.str({});
        line << r.setting_id << ',' << r.procedure_id << ',' << r.replication << ',' << r.seed << ','
             << r.frob_scaled << ',' << r.max_norm << ',' << r.wall_ms << ',' << r.status << '\n';
        out << line.str();
    }
}

}  // namespace glfm
