#pragma once

// Initial estimator + refinement combinations shared by the simulation
// bench, the held-out evaluation and the CLI.

#include <optional>
#include <string>
#include <string_view>

#include "glfm/initial.hpp"
#include "glfm/refine.hpp"

namespace glfm {

enum class InitialKind { Nbe, Cjmle };
enum class RefineKind { None, NoSplit, Split, MultiSplit };

std::string to_string(InitialKind k);
std::string to_string(RefineKind k);
InitialKind parse_initial_kind(std::string_view s);  // "nbe" | "cjmle"
RefineKind parse_refine_kind(std::string_view s);    // "none" | "1" | "2" | "2prime"

struct Procedure {
    InitialKind initial;
    RefineKind refine;
};

// 1-4: NBE with none / Method 1 / Method 2 / Method 2' ; 5-8 the same on CJMLE.
Procedure procedure_from_id(int id);

struct PipelineConfig {
    Index rank = 1;
    std::optional<double> cjmle_c;   // default sqrt(r)
    std::optional<double> nbe_rho;   // default r
    std::optional<double> c2;        // default 2 sqrt(r / p)
    int tot = 5;
    bool lenient = false;
    CjmleConfig cjmle;  // rank and c are overwritten
    NbeConfig nbe;      // rank and rho are overwritten
    NewtonConfig refine_newton;
};

CjmleConfig resolved_cjmle(const PipelineConfig& cfg);
NbeConfig resolved_nbe(const PipelineConfig& cfg);
RefineConfig resolved_refine(const PipelineConfig& cfg, Index p);

Matrix fit_initial(const ObservedMatrix& data, InitialKind kind, const PipelineConfig& cfg);
InitialFitter make_fitter(InitialKind kind, const PipelineConfig& cfg);

// `initial` may carry an already computed full-data fit of the same kind; it
// is only consulted for RefineKind::None and NoSplit.
Matrix run_procedure(const ObservedMatrix& data, Procedure proc, const PipelineConfig& cfg,
                     const RandomStream& split_rng, const Matrix* initial = nullptr);

}  // namespace glfm
