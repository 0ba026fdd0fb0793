#include "glfm/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <omp.h>

#include "CLI11.hpp"
#include "glfm/evaluate.hpp"
#include "glfm/initial.hpp"
#include "glfm/likelihood.hpp"
#include "glfm/matrix_io.hpp"
#include "glfm/pipeline.hpp"
#include "glfm/simbench.hpp"

namespace glfm::cli {

namespace {

// Raised for problems with the input files themselves.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoInputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr const char* kMovieLensHelp =
    "MovieLens-100K is not bundled. Download ml-100k.zip from "
    "https://grouplens.org/datasets/movielens/100k/, unzip it and pass the "
    "ratings file with --data <dir>/ml-100k/u.data";

struct Common {
    int threads = 0;
    std::string config;
    std::string out;
};

struct ModelOpts {
    Index rank = 3;
    std::optional<double> cjmle_c;
    std::optional<double> nbe_rho;
    std::optional<double> c2;
    int tot = 5;
    bool lenient = false;

    PipelineConfig pipeline() const {
        PipelineConfig cfg;
        cfg.rank = rank;
        cfg.cjmle_c = cjmle_c;
        cfg.nbe_rho = nbe_rho;
        cfg.c2 = c2;
        cfg.tot = tot;
        cfg.lenient = lenient;
        return cfg;
    }
};

void add_model_options(CLI::App* sub, ModelOpts& m, bool with_refine) {
    sub->add_option("--rank", m.rank, "Latent rank r")->check(CLI::PositiveNumber);
    sub->add_option("--cjmle.c", m.cjmle_c, "CJMLE two-to-infinity bound (default sqrt(r))")
        ->check(CLI::PositiveNumber);
    sub->add_option("--nbe.rho", m.nbe_rho, "NBE max-norm bound (default r)")->check(CLI::PositiveNumber);
    if (with_refine) {
        sub->add_option("--c2", m.c2, "Refinement loading bound (default 2 sqrt(r/p))")
            ->check(CLI::PositiveNumber);
        sub->add_option("--tot", m.tot, "Number of splits for Method 2'")->check(CLI::PositiveNumber);
        sub->add_flag("--lenient", m.lenient,
                      "Keep boundary points of diverged solves instead of failing");
    }
}

// Reads `key=value` lines; blank lines and '#' comments are skipped.
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw NoInputError("cannot open config file " + path);
    std::vector<std::pair<std::string, std::string>> kv;
    std::string line;
    std::size_t lineno = 0;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return std::string();
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
        kv.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return kv;
}

std::ostream& open_output(const std::string& path, std::ofstream& file, std::ostream& fallback) {
    if (path.empty() || path == "-") return fallback;
    file.open(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write " + path);
    return file;
}

ObservedMatrix load_data(const std::string& path, const std::string& format) {
    if (path.empty()) throw UsageError("--data is required");
    if (!std::filesystem::exists(path)) throw NoInputError("no such file: " + path);
    try {
        if (format == "movielens") return ingest_movielens(path);
        return read_observed_file(path);
    } catch (const std::ios_base::failure& e) {
        throw NoInputError(e.what());
    } catch (const std::exception& e) {
        throw DataError(path + ": " + e.what());
    }
}

std::vector<int> parse_procedures(const std::string& text) {
    std::vector<int> ids;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            const int id = std::stoi(tok, &used);
            if (used != tok.size() || id < 1 || id > 8) throw std::invalid_argument(tok);
            ids.push_back(id);
        } catch (const std::exception&) {
            throw UsageError("bad procedure id '" + tok + "' (expected 1..8)");
        }
    }
    if (ids.empty()) throw UsageError("no procedures selected");
    return ids;
}

double median(std::vector<double> v) {
    v.erase(std::remove_if(v.begin(), v.end(), [](double x) { return std::isnan(x); }), v.end());
    if (v.empty()) return std::nan("");
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

void write_summary(std::ostream& out, const std::vector<RunResult>& rows) {
    std::map<std::pair<int, int>, std::pair<std::vector<double>, std::vector<double>>> groups;
    for (const auto& r : rows) {
        auto& g = groups[{r.setting_id, r.procedure_id}];
        g.first.push_back(r.frob_scaled);
        g.second.push_back(r.max_norm);
    }
    std::ostringstream s;
    s.precision(6);
    s << "setting,procedure,median_frob_scaled,median_max_norm\n";
    for (const auto& [key, g] : groups)
        s << key.first << ',' << key.second << ',' << median(g.first) << ',' << median(g.second) << '\n';
    out << s.str();
}

int finish_results(const std::vector<RunResult>& rows, std::ostream& out) {
    write_results_csv(out, rows);
    const bool partial = std::any_of(rows.begin(), rows.end(), [](const RunResult& r) { return r.status != "ok"; });
    return partial ? kPartial : kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Matrix completion under generalized latent factor models", "glfm"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);

    Common common;
    auto add_common = [&](CLI::App* sub) {
        sub->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        sub->add_option("--threads", common.threads, "Thread budget (0 = all cores)")->check(CLI::NonNegativeNumber);
        sub->add_option("--config", common.config, "key=value file; flags override it");
        sub->add_option("--out", common.out, "Output file (default stdout)");
    };

    // simulate
    auto* sim = app.add_subcommand("simulate", "Run estimation procedures on simulated data");
    add_common(sim);
    std::optional<int> sim_setting;
    std::optional<Index> sim_n, sim_p;
    std::optional<double> sim_pi;
    std::string sim_layout = "ordinal";
    std::string sim_procs = "1,2,3,4,5,6,7,8";
    int sim_reps = 20;
    std::uint64_t seed = 0;
    double scale = 1.0;
    bool timing = false;
    ModelOpts model;
    sim->add_option("--setting", sim_setting, "Registered setting id (1-24)");
    sim->add_option("--n", sim_n, "Rows (explicit setting)")->check(CLI::PositiveNumber);
    sim->add_option("--p", sim_p, "Columns (explicit setting)")->check(CLI::PositiveNumber);
    sim->add_option("--pi", sim_pi, "Observation probability (explicit setting)")->check(CLI::Range(0.0, 1.0));
    sim->add_option("--layout", sim_layout, "ordinal | mixed")->check(CLI::IsMember({"ordinal", "mixed"}));
    sim->add_option("--procedures", sim_procs, "Comma-separated procedure ids 1-8");
    sim->add_option("--reps", sim_reps, "Replications")->check(CLI::PositiveNumber);
    sim->add_option("--seed", seed, "Base seed");
    sim->add_option("--scale", scale, "Multiply n and p of the setting")->check(CLI::PositiveNumber);
    sim->add_flag("--timing", timing, "Record wall-clock times (makes output run-dependent)");
    add_model_options(sim, model, true);

    // fit
    auto* fit = app.add_subcommand("fit", "Fit an initial estimator and write the dense estimate");
    add_common(fit);
    std::string data_path, format = "triplet", init = "cjmle";
    bool verify = false;
    auto add_data = [&](CLI::App* sub) {
        sub->add_option("--data", data_path, "Data file");
        sub->add_option("--format", format, "triplet | movielens")->check(CLI::IsMember({"triplet", "movielens"}));
    };
    add_data(fit);
    fit->add_option("--init", init, "cjmle | nbe")->check(CLI::IsMember({"cjmle", "nbe"}));
    fit->add_flag("--verify", verify, "Check the estimator's constraints after fitting");
    add_model_options(fit, model, false);

    // refine
    auto* ref = app.add_subcommand("refine", "Refine an initial estimate");
    add_common(ref);
    add_data(ref);
    std::string method = "1", mhat_path;
    ref->add_option("--method", method, "1 | 2 | 2prime")->check(CLI::IsMember({"1", "2", "2prime"}));
    ref->add_option("--mhat", mhat_path, "Initial estimate CSV (Method 1; fitted with --init if absent)");
    ref->add_option("--init", init, "Initial estimator for block fits: cjmle | nbe")
        ->check(CLI::IsMember({"cjmle", "nbe"}));
    ref->add_option("--seed", seed, "Seed for row splits");
    add_model_options(ref, model, true);

    // evaluate
    auto* ev = app.add_subcommand("evaluate", "Held-out log-likelihood of a procedure");
    add_common(ev);
    add_data(ev);
    double test_frac = 0.2;
    std::string refine_method = "none";
    ev->add_option("--test-frac", test_frac, "Fraction of entries held out")->check(CLI::Range(0.0, 1.0));
    ev->add_option("--seed", seed, "Seed");
    ev->add_option("--init", init, "cjmle | nbe")->check(CLI::IsMember({"cjmle", "nbe"}));
    ev->add_option("--refine", refine_method, "none | 1 | 2 | 2prime")
        ->check(CLI::IsMember({"none", "1", "2", "2prime"}));
    ev->add_flag("--timing", timing, "Record wall-clock time");
    add_model_options(ev, model, true);

    // reproduce
    auto* rep = app.add_subcommand("reproduce", "Canned experiment pipelines");
    add_common(rep);
    std::string target, summary_path;
    int rep_reps = 5;
    double rep_scale = 0.25;
    rep->add_option("target", target, "figure1-mini | figure2-mini | movielens-table3-row")
        ->required()
        ->check(CLI::IsMember({"figure1-mini", "figure2-mini", "movielens-table3-row"}));
    rep->add_option("--seed", seed, "Base seed");
    rep->add_option("--reps", rep_reps, "Replications per setting")->check(CLI::PositiveNumber);
    rep->add_option("--scale", rep_scale, "Down-scaling of the settings' n and p")->check(CLI::PositiveNumber);
    rep->add_option("--summary", summary_path, "Median summary file (default stderr)");
    rep->add_option("--data", data_path, "MovieLens u.data for movielens-table3-row");
    rep->add_option("--rank", model.rank, "Rank for movielens-table3-row")->check(CLI::PositiveNumber);
    rep->add_flag("--timing", timing, "Record wall-clock times");

    // Config file values go in front of the command-line flags so flags win.
    std::vector<std::string> argv = args;
    try {
        if (argv.size() >= 2) {
            CLI::App* sub = nullptr;
            for (auto* s : app.get_subcommands({})) if (s->get_name() == argv[1]) sub = s;
            std::string cfg_path;
            for (std::size_t k = 2; k < argv.size(); ++k) {
                if (argv[k] == "--config" && k + 1 < argv.size()) cfg_path = argv[k + 1];
                else if (argv[k].rfind("--config=", 0) == 0) cfg_path = argv[k].substr(9);
            }
            if (sub && !cfg_path.empty()) {
                std::vector<std::string> injected;
                for (const auto& [key, value] : read_config(cfg_path)) {
                    if (key == "config" || !sub->get_option_no_throw("--" + key))
                        throw UsageError("unknown config key '" + key + "' for " + sub->get_name());
                    injected.push_back("--" + key + "=" + value);
                }
                argv.insert(argv.begin() + 2, injected.begin(), injected.end());
            }
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const NoInputError& e) {
        err << "error: " << e.what() << '\n';
        return kNoInput;
    }

    try {
        std::vector<std::string> rev(argv.rbegin(), argv.rend() - 1);
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n' << "run with --help for usage\n";
        return kUsage;
    }

    if (common.threads > 0) omp_set_num_threads(common.threads);

    try {
        std::ofstream file;
        if (*sim) {
            SimSetting s;
            if (sim_setting) {
                try {
                    s = setting_by_id(*sim_setting);
                } catch (const std::out_of_range& e) {
                    throw UsageError(e.what());
                }
            } else {
                if (!sim_n || !sim_p || !sim_pi)
                    throw UsageError("give --setting or all of --n, --p, --pi (with --rank)");
                s = {0, *sim_n, *sim_p, model.rank, *sim_pi,
                     sim_layout == "mixed" ? Layout::HalfOrdinalHalfContinuous : Layout::AllOrdinal, 5};
            }
            if (scale != 1.0) s = s.scaled(scale);
            const auto procs = parse_procedures(sim_procs);
            BenchOptions opts;
            opts.pipeline = model.pipeline();
            opts.record_timing = timing;
            const auto rows = run_procedures(s, procs, sim_reps, seed, opts);
            return finish_results(rows, open_output(common.out, file, out));
        }

        if (*fit) {
            const ObservedMatrix data = load_data(data_path, format);
            const PipelineConfig cfg = model.pipeline();
            if (cfg.rank > std::min(data.rows(), data.cols())) throw UsageError("rank exceeds matrix dimensions");
            Matrix m_hat;
            bool ok = true;
            if (init == "cjmle") {
                const CjmleConfig cc = resolved_cjmle(cfg);
                const CjmleResult res = cjmle_fit(data, cc);
                m_hat = res.m_hat;
                if (verify) {
                    const double t = two_to_inf_norm(res.factors.theta), a = two_to_inf_norm(res.factors.a);
                    ok = t <= cc.c + 1e-12 && a <= cc.c + 1e-12;
                    err << "verify: ||theta||_2inf=" << t << " ||A||_2inf=" << a << " C=" << cc.c
                        << (ok ? " ok" : " VIOLATED") << '\n';
                }
            } else {
                const NbeConfig nc = resolved_nbe(cfg);
                m_hat = nbe_fit(data, nc).m_hat;
                if (verify) {
                    const double radius = nc.rho * std::sqrt(static_cast<double>(nc.rank) * data.rows() * data.cols());
                    const double mx = m_hat.cwiseAbs().maxCoeff(), nuc = nuclear_norm(m_hat);
                    ok = mx <= nc.rho + 1e-6 && nuc <= radius * (1.0 + 1e-6);
                    err << "verify: ||M||_max=" << mx << " ||M||_*=" << nuc << " rho=" << nc.rho
                        << " radius=" << radius << (ok ? " ok" : " VIOLATED") << '\n';
                }
            }
            write_matrix_csv(open_output(common.out, file, out), m_hat);
            return ok ? kOk : kFatal;
        }

        if (*ref) {
            const ObservedMatrix data = load_data(data_path, format);
            const PipelineConfig cfg = model.pipeline();
            if (cfg.rank > std::min(data.rows(), data.cols())) throw UsageError("rank exceeds matrix dimensions");
            const RefineConfig rc = resolved_refine(cfg, data.cols());
            const InitialKind kind = parse_initial_kind(init);
            const RandomStream rng = RandomStream(seed).derive(stream_role::split);
            Matrix result;
            if (method == "1") {
                Matrix m_hat;
                if (!mhat_path.empty()) {
                    if (!std::filesystem::exists(mhat_path)) throw NoInputError("no such file: " + mhat_path);
                    try {
                        m_hat = read_matrix_csv_file(mhat_path);
                    } catch (const std::exception& e) {
                        throw DataError(mhat_path + ": " + e.what());
                    }
                    if (m_hat.rows() != data.rows() || m_hat.cols() != data.cols())
                        throw DataError("estimate is " + std::to_string(m_hat.rows()) + "x" +
                                        std::to_string(m_hat.cols()) + " but data is " +
                                        std::to_string(data.rows()) + "x" + std::to_string(data.cols()));
                } else {
                    m_hat = fit_initial(data, kind, cfg);
                }
                result = refine_no_split(data, m_hat, rc);
            } else if (method == "2") {
                result = refine_split_with(data, make_fitter(kind, cfg), rc, rng);
            } else {
                result = refine_multi_split(data, make_fitter(kind, cfg), rc, rng);
            }
            write_matrix_csv(open_output(common.out, file, out), result);
            return kOk;
        }

        if (*ev) {
            const ObservedMatrix data = load_data(data_path, format);
            const PipelineConfig cfg = model.pipeline();
            const Procedure proc{parse_initial_kind(init), parse_refine_kind(refine_method)};
            const EvalRecord rec = evaluate_procedure(data, test_frac, proc, cfg, seed, timing);
            open_output(common.out, file, out) << rec.to_json() << '\n';
            return kOk;
        }

        if (*rep) {
            std::ofstream summary_file;
            if (target == "movielens-table3-row") {
                if (data_path.empty() || !std::filesystem::exists(data_path))
                    throw NoInputError(std::string("MovieLens ratings file not found. ") + kMovieLensHelp);
                const ObservedMatrix data = load_data(data_path, "movielens");
                PipelineConfig cfg = model.pipeline();
                cfg.lenient = true;
                std::ostream& o = open_output(common.out, file, out);
                o << "procedure,init,refine,rank,train_ll,test_ll,wall_ms\n";
                for (int id = 1; id <= 8; ++id) {
                    const Procedure proc = procedure_from_id(id);
                    const EvalRecord r = evaluate_procedure(data, 0.2, proc, cfg, seed, timing);
                    std::ostringstream line;
                    line.precision(10);
                    line << id << ',' << to_string(proc.initial) << ',' << to_string(proc.refine) << ','
                         << r.rank << ',' << r.train_ll << ',' << r.test_ll << ',' << r.wall_ms << '\n';
                    o << line.str();
                }
                return kOk;
            }
            const std::vector<int> ids = target == "figure1-mini" ? std::vector<int>{1, 2, 3}
                                                                  : std::vector<int>{4, 5, 6};
            BenchOptions opts;
            opts.record_timing = timing;
            std::vector<RunResult> rows;
            for (int id : ids) {
                const SimSetting s = setting_by_id(id).scaled(rep_scale);
                auto part = run_procedures(s, {1, 2, 3, 4, 5, 6, 7, 8}, rep_reps, seed, opts);
                rows.insert(rows.end(), part.begin(), part.end());
            }
            const int code = finish_results(rows, open_output(common.out, file, out));
            write_summary(open_output(summary_path, summary_file, err), rows);
            return code;
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const NoInputError& e) {
        err << "error: " << e.what() << '\n';
        return kNoInput;
    } catch (const DataError& e) {
        err << "error: " << e.what() << '\n';
        return kDataErr;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFatal;
    }
    return kUsage;
}

}  // namespace glfm::cli
