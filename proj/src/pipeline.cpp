#include "glfm/pipeline.hpp"

#include <stdexcept>

namespace glfm {

std::string to_string(InitialKind k) { return k == InitialKind::Nbe ? "nbe" : "cjmle"; }

std::string to_string(RefineKind k) {
    switch (k) {
        case RefineKind::None: return "none";
        case RefineKind::NoSplit: return "1";
        case RefineKind::Split: return "2";
        case RefineKind::MultiSplit: return "2prime";
    }
    return "none";
}

InitialKind parse_initial_kind(std::string_view s) {
    if (s == "nbe") return InitialKind::Nbe;
    if (s == "cjmle") return InitialKind::Cjmle;
    throw std::invalid_argument("unknown initial estimator '" + std::string(s) + "'");
}

RefineKind parse_refine_kind(std::string_view s) {
    if (s == "none") return RefineKind::None;
    if (s == "1") return RefineKind::NoSplit;
    if (s == "2") return RefineKind::Split;
    if (s == "2prime") return RefineKind::MultiSplit;
    throw std::invalid_argument("unknown refinement method '" + std::string(s) + "'");
}

Procedure procedure_from_id(int id) {
    if (id < 1 || id > 8) throw std::out_of_range("procedure id must be in 1..8");
    constexpr RefineKind order[] = {RefineKind::None, RefineKind::NoSplit, RefineKind::Split,
                                    RefineKind::MultiSplit};
    return {id <= 4 ? InitialKind::Nbe : InitialKind::Cjmle, order[(id - 1) % 4]};
}

CjmleConfig resolved_cjmle(const PipelineConfig& cfg) {
    CjmleConfig c = cfg.cjmle;
    c.rank = cfg.rank;
    c.c = cfg.cjmle_c.value_or(default_cjmle_c(cfg.rank));
    return c;
}

NbeConfig resolved_nbe(const PipelineConfig& cfg) {
    NbeConfig c = cfg.nbe;
    c.rank = cfg.rank;
    c.rho = cfg.nbe_rho.value_or(default_nbe_rho(cfg.rank));
    return c;
}

RefineConfig resolved_refine(const PipelineConfig& cfg, Index p) {
    RefineConfig c;
    c.rank = cfg.rank;
    c.c2 = cfg.c2.value_or(default_c2(cfg.rank, p));
    c.tot = cfg.tot;
    c.lenient = cfg.lenient;
    c.newton = cfg.refine_newton;
    return c;
}

Matrix fit_initial(const ObservedMatrix& data, InitialKind kind, const PipelineConfig& cfg) {
    if (kind == InitialKind::Nbe) return nbe_fit(data, resolved_nbe(cfg)).m_hat;
    return cjmle_fit(data, resolved_cjmle(cfg)).m_hat;
}

InitialFitter make_fitter(InitialKind kind, const PipelineConfig& cfg) {
    return [kind, cfg](const ObservedMatrix& block) { return fit_initial(block, kind, cfg); };
}

Matrix run_procedure(const ObservedMatrix& data, Procedure proc, const PipelineConfig& cfg,
                     const RandomStream& split_rng, const Matrix* initial) {
    const RefineConfig rc = resolved_refine(cfg, data.cols());
    switch (proc.refine) {
        case RefineKind::None:
            return initial ? *initial : fit_initial(data, proc.initial, cfg);
        case RefineKind::NoSplit: {
            if (initial) return refine_no_split(data, *initial, rc);
            return refine_no_split(data, fit_initial(data, proc.initial, cfg), rc);
        }
        case RefineKind::Split:
            return refine_split_with(data, make_fitter(proc.initial, cfg), rc, split_rng);
        case RefineKind::MultiSplit:
            return refine_multi_split(data, make_fitter(proc.initial, cfg), rc, split_rng);
    }
    throw std::logic_error("unreachable refinement kind");
}

}  // namespace glfm
