#include "wavesim/renewal.hpp"

#include "wavesim/error.hpp"
#include "wavesim/ingest.hpp"
#include "wavesim/stats.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace wavesim::renewal {

std::vector<DurationRecord> extract_durations(std::span<const std::int8_t> regimes, const SeasonBoundaries& seasons,
                                              std::int64_t first_hour) {
    std::vector<DurationRecord> runs;
    const auto n = static_cast<std::int64_t>(regimes.size());
    std::int64_t i = 0;
    while (i < n) {
        const std::int8_t r = regimes[static_cast<std::size_t>(i)];
        if (r == ingest::kMissingRegime) {
            ++i;
            continue;
        }
        std::int64_t j = i + 1;
        while (j < n && regimes[static_cast<std::size_t>(j)] == r) {
            ++j;
        }
        DurationRecord d;
        d.regime = r;
        d.length = j - i;
        d.start = first_hour + i;
        d.season = seasons.season_of(d.start % kHoursPerYear);
        const bool open_left = i == 0 || regimes[static_cast<std::size_t>(i - 1)] == ingest::kMissingRegime;
        const bool open_right = j == n || regimes[static_cast<std::size_t>(j)] == ingest::kMissingRegime;
        d.censored = open_left || open_right;
        runs.push_back(d);
        i = j;
    }
    return runs;
}

DurationMargin::DurationMargin(std::vector<std::int64_t> durations) {
    if (durations.empty()) {
        throw SizeError("duration margin needs at least one run");
    }
    if (std::any_of(durations.begin(), durations.end(), [](std::int64_t d) { return d < 1; })) {
        throw DomainError("run durations must be at least one hour");
    }
    std::sort(durations.begin(), durations.end());
    sorted_ = std::move(durations);
}

std::int64_t DurationMargin::quantile(double u) const {
    const auto n = sorted_.size();
    // position on the 1-based order-statistic axis
    const double pos = std::clamp(u * static_cast<double>(n + 1), 1.0, static_cast<double>(n));
    const auto k = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(k);
    const double lo = static_cast<double>(sorted_[k - 1]);
    const double hi = static_cast<double>(sorted_[std::min(k, n - 1)]);
    const double x = lo + frac * (hi - lo);
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(x + 0.5)));
}

void RenewalModel::validate() const {
    seasons.validate();
    for (Season s : kAllSeasons) {
        const auto& m = season(s);
        if (m.north.empty() || m.southwest.empty()) {
            throw DomainError(fmt::format("renewal model: {} margin is empty", season_name(s)));
        }
        m.north_then_southwest.validate();
        m.southwest_then_north.validate();
    }
}

RenewalFit fit_renewal(std::span<const DurationRecord> durations, const SeasonBoundaries& seasons,
                       const RenewalFitOptions& options) {
    seasons.validate();
    RenewalFit fit;
    fit.model.seasons = seasons;

    std::array<std::vector<std::int64_t>, 4> north;
    std::array<std::vector<std::int64_t>, 4> southwest;
    struct PairSet {
        std::vector<double> first;
        std::vector<double> second;
    };
    std::array<PairSet, 4> ns;
    std::array<PairSet, 4> sn;

    for (std::size_t k = 0; k < durations.size(); ++k) {
        const auto& d = durations[k];
        if (d.censored) {
            continue;
        }
        const auto s = static_cast<std::size_t>(d.season);
        (d.regime == ingest::kRegimeNorth ? north : southwest)[s].push_back(d.length);
        if (k == 0) {
            continue;
        }
        const auto& prev = durations[k - 1];
        if (prev.censored || prev.start + prev.length != d.start || prev.regime == d.regime) {
            continue;
        }
        auto& set = d.regime == ingest::kRegimeSouthwest ? ns[s] : sn[s];
        set.first.push_back(static_cast<double>(prev.length));
        set.second.push_back(static_cast<double>(d.length));
    }

    for (Season season : kAllSeasons) {
        const auto s = static_cast<std::size_t>(season);
        auto& sm = fit.model.by_season[s];
        auto& rep = fit.report[s];
        rep.north_runs = north[s].size();
        rep.southwest_runs = southwest[s].size();
        rep.ns_pairs = ns[s].first.size();
        rep.sn_pairs = sn[s].first.size();
        for (const auto* set : {&ns[s], &sn[s]}) {
            if (set->first.size() < options.min_pairs) {
                throw SizeError(fmt::format("{}: only {} consecutive run pairs ({} required)", season_name(season),
                                            set->first.size(), options.min_pairs));
            }
        }
        sm.north = DurationMargin(north[s]);
        sm.southwest = DurationMargin(southwest[s]);

        auto select = [&](const PairSet& set, double& tau, double& aic) {
            const auto u = stats::pseudo_observations(set.first);
            const auto v = stats::pseudo_observations(set.second);
            tau = stats::kendall_tau(u, v);
            const auto sel = copula::select_copula(u, v, options.candidates);
            aic = sel.best.aic;
            return sel.best.spec;
        };
        sm.north_then_southwest = select(ns[s], rep.ns_empirical_tau, rep.ns_aic);
        sm.southwest_then_north = select(sn[s], rep.sn_empirical_tau, rep.sn_aic);
    }
    return fit;
}

std::vector<std::int8_t> simulate_regimes(const RenewalModel& model, std::int64_t n_hours, std::int8_t initial_regime,
                                          Rng& rng, std::int64_t first_hour) {
    if (n_hours < 1) {
        throw DomainError("simulate_regimes needs at least one hour");
    }
    if (initial_regime != ingest::kRegimeNorth && initial_regime != ingest::kRegimeSouthwest) {
        throw DomainError("initial regime must be 0 (north) or 1 (southwest)");
    }
    std::vector<std::int8_t> out(static_cast<std::size_t>(n_hours));
    std::int64_t h = 0;
    std::int8_t regime = initial_regime;
    double u_prev = 0.0;
    bool first = true;
    while (h < n_hours) {
        const Season season = model.seasons.season_of((first_hour + h) % kHoursPerYear);
        const auto& sm = model.season(season);
        const bool sw = regime == ingest::kRegimeSouthwest;
        double u = 0.0;
        if (first) {
            u = rng.uniform();
            first = false;
        } else {
            const auto& c = sw ? sm.north_then_southwest : sm.southwest_then_north;
            u = copula::h_inverse_first(c, rng.uniform(), u_prev);
        }
        const std::int64_t len = (sw ? sm.southwest : sm.north).quantile(u);
        const std::int64_t end = std::min(n_hours, h + len);
        std::fill(out.begin() + h, out.begin() + end, regime);
        h = end;
        u_prev = u;
        regime = sw ? ingest::kRegimeNorth : ingest::kRegimeSouthwest;
    }
    return out;
}

} // namespace wavesim::renewal
