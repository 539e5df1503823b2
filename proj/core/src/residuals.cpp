#include "wavesim/residuals.hpp"

#include "wavesim/error.hpp"

#include <fmt/format.h>

#include <cmath>

namespace wavesim::residuals {

void ResidualModel::validate() const {
    for (const auto& law : regimes) {
        law.hm0.validate();
        law.tm02.validate();
        law.copula.validate();
        for (const auto* m : {&law.hm0, &law.tm02}) {
            if (std::abs(m->mu) > 5.0 * m->sigma) {
                throw DomainError("residual margin location is implausibly far from zero");
            }
        }
    }
}

ResidualFit fit_residual_model(std::span<const double> eps_hm0, std::span<const double> eps_tm02,
                               std::span<const std::int8_t> regimes, const ResidualFitOptions& options) {
    if (eps_hm0.size() != eps_tm02.size() || eps_hm0.size() != regimes.size()) {
        throw SizeError("residual model: series lengths differ");
    }
    ResidualFit fit;
    for (std::int8_t k = 0; k < 2; ++k) {
        std::vector<double> h;
        std::vector<double> t;
        for (std::size_t i = 0; i < regimes.size(); ++i) {
            if (regimes[i] == k && std::isfinite(eps_hm0[i]) && std::isfinite(eps_tm02[i])) {
                h.push_back(eps_hm0[i]);
                t.push_back(eps_tm02[i]);
            }
        }
        if (h.size() < options.min_pairs) {
            throw SizeError(fmt::format("regime {}: only {} residual pairs ({} required)", k, h.size(),
                                        options.min_pairs));
        }
        auto& law = fit.model.regimes[static_cast<std::size_t>(k)];
        auto& rep = fit.report[static_cast<std::size_t>(k)];
        const auto fh = stats::fit_skew_t(h);
        const auto ft = stats::fit_skew_t(t);
        law.hm0 = fh.params;
        law.tm02 = ft.params;
        rep.hm0_shape_at_boundary = fh.shape_at_boundary;
        rep.tm02_shape_at_boundary = ft.shape_at_boundary;
        const auto u = stats::pseudo_observations(h);
        const auto v = stats::pseudo_observations(t);
        rep.pairs = h.size();
        rep.empirical_tau = stats::kendall_tau(u, v);
        const auto sel = copula::select_copula(u, v, options.candidates);
        law.copula = sel.best.spec;
        rep.copula_aic = sel.best.aic;
    }
    return fit;
}

ResidualPair sample_pair(const ResidualModel& model, std::int8_t regime, Rng& rng) {
    if (regime != 0 && regime != 1) {
        throw DomainError(fmt::format("residual regime must be 0 or 1, got {}", regime));
    }
    const auto& law = model.regimes[static_cast<std::size_t>(regime)];
    const double v = rng.uniform();
    const double u = copula::h_inverse(law.copula, rng.uniform(), v);
    return {stats::skew_t_quantile(law.hm0, u), stats::skew_t_quantile(law.tm02, v)};
}

} // namespace wavesim::residuals
