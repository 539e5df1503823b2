#include "wavesim/validate.hpp"

#include "detail/json_io.hpp"
#include "wavesim/error.hpp"
#include "wavesim/stats.hpp"
#include "wavesim/steepness.hpp"
#include "wavesim/version.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace wavesim::validate {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr auto kYear = static_cast<std::size_t>(kHoursPerYear);

std::size_t whole_years(std::size_t n, std::string_view what) {
    if (n < kYear || n % kYear != 0) {
        throw SizeError(fmt::format("{} must cover whole model years of {} hours, got {} hours", what, kYear, n));
    }
    return n / kYear;
}

std::vector<double> present(std::span<const double> x) {
    std::vector<double> out;
    out.reserve(x.size());
    for (double v : x) {
        if (std::isfinite(v)) {
            out.push_back(v);
        }
    }
    return out;
}

} // namespace

// ---- percentages ---------------------------------------------------------------

std::vector<SeasonFractions> season_percentages(std::span<const std::int8_t> regimes, const SeasonBoundaries& seasons) {
    const std::size_t years = whole_years(regimes.size(), "regime series");
    std::vector<SeasonFractions> out(years);
    for (std::size_t y = 0; y < years; ++y) {
        std::array<std::size_t, 4> sw{};
        std::array<std::size_t, 4> total{};
        for (std::size_t h = 0; h < kYear; ++h) {
            const auto r = regimes[y * kYear + h];
            if (r == ingest::kMissingRegime) {
                continue;
            }
            const auto s = static_cast<std::size_t>(seasons.season_of(static_cast<std::int64_t>(h)));
            ++total[s];
            sw[s] += r == ingest::kRegimeSouthwest ? 1 : 0;
        }
        for (std::size_t s = 0; s < 4; ++s) {
            out[y][s] = total[s] ? static_cast<double>(sw[s]) / static_cast<double>(total[s]) : kNaN;
        }
    }
    return out;
}

// ---- storms --------------------------------------------------------------------

void StormThresholds::validate() const {
    if (!(h_star > 0.0) || !(t_star > 0.0)) {
        throw DomainError("storm thresholds must be positive");
    }
}

StormThresholds thresholds_from_quantile(std::span<const double> hm0, std::span<const double> tm02, double q) {
    if (!(q > 0.0 && q < 1.0)) {
        throw DomainError("threshold quantile must lie in (0, 1)");
    }
    const auto h = present(hm0);
    const auto t = present(tm02);
    if (h.empty() || t.empty()) {
        throw SizeError("thresholds need present hm0 and tm02 values");
    }
    StormThresholds th{q, stats::sample_quantile(h, q), stats::sample_quantile(t, q)};
    th.validate();
    return th;
}

std::vector<std::int64_t> StormStatistics::durations() const {
    std::vector<std::int64_t> out;
    out.reserve(events.size());
    for (const auto& e : events) {
        out.push_back(e.duration);
    }
    return out;
}

StormStatistics extract_storms(std::span<const double> hm0, std::span<const double> tm02,
                               const StormThresholds& th) {
    th.validate();
    if (hm0.size() != tm02.size()) {
        throw SizeError("extract_storms: series lengths differ");
    }
    enum class State { missing, storm, calm };
    const auto n = static_cast<std::int64_t>(hm0.size());
    auto state = [&](std::int64_t i) {
        const double h = hm0[static_cast<std::size_t>(i)];
        const double t = tm02[static_cast<std::size_t>(i)];
        if (!std::isfinite(h) || !std::isfinite(t)) {
            return State::missing;
        }
        return (h >= th.h_star && t >= th.t_star) ? State::storm : State::calm;
    };
    StormStatistics out;
    std::int64_t i = 0;
    State prev = State::missing;
    while (i < n) {
        const State s = state(i);
        std::int64_t j = i + 1;
        while (j < n && state(j) == s) {
            ++j;
        }
        const std::int64_t len = j - i;
        switch (s) {
        case State::missing:
            out.missing_hours += len;
            break;
        case State::storm: {
            StormEvent e{i, len, 0.0, 0.0};
            for (std::int64_t k = i; k < j; ++k) {
                e.peak_hm0 = std::max(e.peak_hm0, hm0[static_cast<std::size_t>(k)]);
                e.peak_tm02 = std::max(e.peak_tm02, tm02[static_cast<std::size_t>(k)]);
            }
            out.events.push_back(e);
            break;
        }
        case State::calm:
            if (prev == State::storm && j < n && state(j) == State::storm) {
                out.interarrivals.push_back(len);
            } else {
                out.boundary_hours += len;
            }
            break;
        }
        prev = s;
        i = j;
    }
    return out;
}

CountBand storm_count_band(std::span<const double> hm0, std::span<const double> tm02, std::size_t window_years,
                           const StormThresholds& th) {
    if (window_years < 1) {
        throw DomainError("storm count window must be at least one year");
    }
    const std::size_t window = window_years * kYear;
    const std::size_t segments = hm0.size() / window;
    if (segments < 2) {
        throw SizeError(fmt::format("storm count band needs at least two {}-year windows, got {}", window_years,
                                    segments));
    }
    CountBand band;
    for (std::size_t s = 0; s < segments; ++s) {
        const auto stats = extract_storms(hm0.subspan(s * window, window), tm02.subspan(s * window, window), th);
        band.counts.push_back(stats.events.size());
    }
    std::vector<double> c(band.counts.begin(), band.counts.end());
    band.q05 = stats::sample_quantile(c, 0.05);
    band.q95 = stats::sample_quantile(c, 0.95);
    return band;
}

// ---- 2-D density and contours -------------------------------------------------

Density2D kde_2d(std::span<const double> x, std::span<const double> y, std::vector<double> x_grid,
                 std::vector<double> y_grid, double bw_x, double bw_y) {
    if (x_grid.size() < 2 || y_grid.size() < 2) {
        throw SizeError("2-D KDE grid needs at least two points per axis");
    }
    if (!(bw_x > 0.0) || !(bw_y > 0.0)) {
        throw DomainError("2-D KDE bandwidths must be positive");
    }
    const std::size_t nx = x_grid.size();
    const std::size_t ny = y_grid.size();
    const double dx = (x_grid.back() - x_grid.front()) / static_cast<double>(nx - 1);
    const double dy = (y_grid.back() - y_grid.front()) / static_cast<double>(ny - 1);
    std::vector<double> counts(nx * ny, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
            continue;
        }
        total += 1.0;
        const double fx = std::clamp((x[i] - x_grid.front()) / dx, 0.0, static_cast<double>(nx - 1));
        const double fy = std::clamp((y[i] - y_grid.front()) / dy, 0.0, static_cast<double>(ny - 1));
        const auto ix = std::min(static_cast<std::size_t>(fx), nx - 2);
        const auto iy = std::min(static_cast<std::size_t>(fy), ny - 2);
        const double wx = fx - static_cast<double>(ix);
        const double wy = fy - static_cast<double>(iy);
        counts[iy * nx + ix] += (1 - wx) * (1 - wy);
        counts[iy * nx + ix + 1] += wx * (1 - wy);
        counts[(iy + 1) * nx + ix] += (1 - wx) * wy;
        counts[(iy + 1) * nx + ix + 1] += wx * wy;
    }
    if (total == 0.0) {
        throw SizeError("2-D KDE of an empty sample");
    }
    auto kernel = [](double step, double bw) {
        const auto reach = static_cast<std::ptrdiff_t>(std::ceil(4.0 * bw / step));
        std::vector<double> k(static_cast<std::size_t>(2 * reach + 1));
        for (std::ptrdiff_t d = -reach; d <= reach; ++d) {
            const double u = static_cast<double>(d) * step / bw;
            k[static_cast<std::size_t>(d + reach)] = std::exp(-0.5 * u * u) / (bw * std::sqrt(2.0 * M_PI));
        }
        return k;
    };
    const auto kx = kernel(dx, bw_x);
    const auto ky = kernel(dy, bw_y);
    const auto rx = static_cast<std::ptrdiff_t>(kx.size() / 2);
    const auto ry = static_cast<std::ptrdiff_t>(ky.size() / 2);
    std::vector<double> tmp(nx * ny, 0.0);
    for (std::size_t iy = 0; iy < ny; ++iy) {
        for (std::size_t ix = 0; ix < nx; ++ix) {
            const double c = counts[iy * nx + ix];
            if (c == 0.0) {
                continue;
            }
            for (std::ptrdiff_t d = -rx; d <= rx; ++d) {
                const auto t = static_cast<std::ptrdiff_t>(ix) + d;
                if (t >= 0 && t < static_cast<std::ptrdiff_t>(nx)) {
                    tmp[iy * nx + static_cast<std::size_t>(t)] += c * kx[static_cast<std::size_t>(d + rx)];
                }
            }
        }
    }
    Density2D out{std::move(x_grid), std::move(y_grid), std::vector<double>(nx * ny, 0.0)};
    for (std::size_t iy = 0; iy < ny; ++iy) {
        for (std::ptrdiff_t d = -ry; d <= ry; ++d) {
            const auto t = static_cast<std::ptrdiff_t>(iy) + d;
            if (t < 0 || t >= static_cast<std::ptrdiff_t>(ny)) {
                continue;
            }
            const double w = ky[static_cast<std::size_t>(d + ry)] / total;
            for (std::size_t ix = 0; ix < nx; ++ix) {
                out.values[static_cast<std::size_t>(t) * nx + ix] += w * tmp[iy * nx + ix];
            }
        }
    }
    return out;
}

std::vector<Polyline> contour_lines(const Density2D& d, double level) {
    const std::size_t nx = d.x_grid.size();
    const std::size_t ny = d.y_grid.size();
    // Crossing points keyed by grid edge: horizontal edges (ix, iy)-(ix+1, iy)
    // get id 2 (iy nx + ix), vertical ones 2 (iy nx + ix) + 1.
    auto edge_h = [&](std::size_t ix, std::size_t iy) { return 2 * (iy * nx + ix); };
    auto edge_v = [&](std::size_t ix, std::size_t iy) { return 2 * (iy * nx + ix) + 1; };
    auto point = [&](std::size_t edge) -> std::array<double, 2> {
        const std::size_t cell = edge / 2;
        const std::size_t ix = cell % nx;
        const std::size_t iy = cell / nx;
        const double a = d.at(ix, iy);
        if (edge % 2 == 0) {
            const double b = d.at(ix + 1, iy);
            const double f = (level - a) / (b - a);
            return {d.x_grid[ix] + f * (d.x_grid[ix + 1] - d.x_grid[ix]), d.y_grid[iy]};
        }
        const double b = d.at(ix, iy + 1);
        const double f = (level - a) / (b - a);
        return {d.x_grid[ix], d.y_grid[iy] + f * (d.y_grid[iy + 1] - d.y_grid[iy])};
    };

    std::map<std::size_t, std::vector<std::size_t>> adjacency;
    auto link = [&](std::size_t a, std::size_t b) {
        adjacency[a].push_back(b);
        adjacency[b].push_back(a);
    };
    for (std::size_t iy = 0; iy + 1 < ny; ++iy) {
        for (std::size_t ix = 0; ix + 1 < nx; ++ix) {
            const bool b0 = d.at(ix, iy) >= level;
            const bool b1 = d.at(ix + 1, iy) >= level;
            const bool b2 = d.at(ix + 1, iy + 1) >= level;
            const bool b3 = d.at(ix, iy + 1) >= level;
            const int code = b0 | (b1 << 1) | (b2 << 2) | (b3 << 3);
            const std::size_t bottom = edge_h(ix, iy);
            const std::size_t top = edge_h(ix, iy + 1);
            const std::size_t left = edge_v(ix, iy);
            const std::size_t right = edge_v(ix + 1, iy);
            switch (code) {
            case 0:
            case 15:
                break;
            case 1:
            case 14:
                link(left, bottom);
                break;
            case 2:
            case 13:
                link(bottom, right);
                break;
            case 3:
            case 12:
                link(left, right);
                break;
            case 4:
            case 11:
                link(right, top);
                break;
            case 6:
            case 9:
                link(bottom, top);
                break;
            case 7:
            case 8:
                link(left, top);
                break;
            case 5:
            case 10: {
                const double centre =
                    0.25 * (d.at(ix, iy) + d.at(ix + 1, iy) + d.at(ix + 1, iy + 1) + d.at(ix, iy + 1));
                const bool centre_high = centre >= level;
                // corners 0 and 2 high (code 5) connect through the centre when it is high too
                if ((code == 5) == centre_high) {
                    link(left, top);
                    link(bottom, right);
                } else {
                    link(left, bottom);
                    link(right, top);
                }
                break;
            }
            default:
                break;
            }
        }
    }

    std::vector<Polyline> lines;
    std::map<std::size_t, bool> used;
    auto walk = [&](std::size_t start) {
        Polyline line{point(start)};
        std::size_t prev = start;
        std::size_t cur = start;
        used[start] = true;
        while (true) {
            std::size_t next = cur;
            for (std::size_t nb : adjacency[cur]) {
                if (nb != prev && !used[nb]) {
                    next = nb;
                    break;
                }
            }
            if (next == cur) {
                // close loops back onto the start
                for (std::size_t nb : adjacency[cur]) {
                    if (nb == start && cur != start && line.size() > 2) {
                        line.push_back(point(start));
                        break;
                    }
                }
                break;
            }
            used[next] = true;
            line.push_back(point(next));
            prev = cur;
            cur = next;
        }
        return line;
    };
    // open chains first (endpoints have a single neighbour), then loops
    for (const auto& [edge, nbs] : adjacency) {
        if (nbs.size() == 1 && !used[edge]) {
            lines.push_back(walk(edge));
        }
    }
    for (const auto& [edge, nbs] : adjacency) {
        if (!used[edge]) {
            lines.push_back(walk(edge));
        }
    }
    return lines;
}

std::string_view filter_name(RegimeFilter f) {
    switch (f) {
    case RegimeFilter::north:
        return "north";
    case RegimeFilter::southwest:
        return "southwest";
    default:
        return "all";
    }
}

namespace {

bool keep(RegimeFilter f, std::int8_t regime) {
    switch (f) {
    case RegimeFilter::north:
        return regime == ingest::kRegimeNorth;
    case RegimeFilter::southwest:
        return regime == ingest::kRegimeSouthwest;
    default:
        return true;
    }
}

// Variable extracted hour by hour; NaN when missing or filtered out.
std::vector<double> variable_values(const ingest::HourlySeries& s, int variable, RegimeFilter f, std::size_t begin,
                                    std::size_t end) {
    std::vector<double> out;
    for (std::size_t i = begin; i < end; ++i) {
        if (!keep(f, s.regime[i]) || !s.joint_present(i)) {
            continue;
        }
        const double h = s.hm0[i];
        const double t = s.tm02[i];
        switch (variable) {
        case 0:
            out.push_back(h);
            break;
        case 1:
            out.push_back(t);
            break;
        default:
            out.push_back(steepness::steepness(h, t));
            break;
        }
    }
    return out;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) {
        g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return g;
}

} // namespace

DensityReport density_report(const ingest::HourlySeries& observed, const ingest::HourlySeries& simulated,
                             const DensityOptions& options) {
    if (observed.empty() || simulated.empty()) {
        throw SizeError("density report needs non-empty observed and simulated series");
    }
    const std::size_t obs_years = std::max<std::size_t>(1, observed.size() / kYear);
    const std::size_t sim_years =
        std::min(options.max_simulated_years, std::max<std::size_t>(1, simulated.size() / kYear));
    auto year_span = [](const ingest::HourlySeries& s, std::size_t y, std::size_t years) {
        const std::size_t begin = years == 1 && s.size() < kYear ? 0 : y * kYear;
        return std::pair{begin, std::min(s.size(), begin + kYear)};
    };
    constexpr std::array<const char*, 3> kNames{"hm0", "tm02", "steepness"};

    DensityReport report;
    for (RegimeFilter f : {RegimeFilter::all, RegimeFilter::north, RegimeFilter::southwest}) {
        for (int v = 0; v < 3; ++v) {
            const auto pooled_obs = variable_values(observed, v, f, 0, observed.size());
            const auto pooled_sim = variable_values(simulated, v, f, 0, std::min(simulated.size(), sim_years * kYear));
            if (pooled_obs.size() < 2 || pooled_sim.size() < 2) {
                continue;
            }
            DensityCurves c;
            c.variable = kNames[static_cast<std::size_t>(v)];
            c.filter = f;
            c.bandwidth = stats::silverman_bandwidth(pooled_obs);
            const double lo = std::min(*std::min_element(pooled_obs.begin(), pooled_obs.end()),
                                       *std::min_element(pooled_sim.begin(), pooled_sim.end()));
            const double hi = std::max(*std::max_element(pooled_obs.begin(), pooled_obs.end()),
                                       *std::max_element(pooled_sim.begin(), pooled_sim.end()));
            c.grid = linspace(lo - 3.0 * c.bandwidth, hi + 3.0 * c.bandwidth, options.grid_points);
            for (std::size_t y = 0; y < obs_years; ++y) {
                const auto [b, e] = year_span(observed, y, obs_years);
                const auto vals = variable_values(observed, v, f, b, e);
                if (!vals.empty()) {
                    c.observed_years.push_back(stats::kde_density(vals, c.grid, c.bandwidth));
                }
            }
            c.simulated_min.assign(c.grid.size(), std::numeric_limits<double>::infinity());
            c.simulated_max.assign(c.grid.size(), 0.0);
            bool any = false;
            for (std::size_t y = 0; y < sim_years; ++y) {
                const auto [b, e] = year_span(simulated, y, sim_years);
                const auto vals = variable_values(simulated, v, f, b, e);
                if (vals.empty()) {
                    continue;
                }
                any = true;
                const auto dens = stats::kde_density(vals, c.grid, c.bandwidth);
                for (std::size_t g = 0; g < dens.size(); ++g) {
                    c.simulated_min[g] = std::min(c.simulated_min[g], dens[g]);
                    c.simulated_max[g] = std::max(c.simulated_max[g], dens[g]);
                }
            }
            if (!any) {
                std::fill(c.simulated_min.begin(), c.simulated_min.end(), 0.0);
            }
            std::size_t inside = 0;
            std::size_t total = 0;
            for (const auto& curve : c.observed_years) {
                for (std::size_t g = 0; g < curve.size(); ++g) {
                    // tolerance absorbs exact ties such as observed == simulated input
                    const double tol = 1e-12 * std::max(1.0, c.simulated_max[g]);
                    inside += (curve[g] >= c.simulated_min[g] - tol && curve[g] <= c.simulated_max[g] + tol) ? 1 : 0;
                    ++total;
                }
            }
            c.coverage = total ? static_cast<double>(inside) / static_cast<double>(total) : 0.0;
            report.curves.push_back(std::move(c));
        }

        const auto oh = variable_values(observed, 0, f, 0, observed.size());
        const auto ot = variable_values(observed, 1, f, 0, observed.size());
        const std::size_t sim_end = std::min(simulated.size(), sim_years * kYear);
        const auto sh = variable_values(simulated, 0, f, 0, sim_end);
        const auto st = variable_values(simulated, 1, f, 0, sim_end);
        if (oh.size() < 2 || sh.size() < 2) {
            continue;
        }
        const double bx = stats::silverman_bandwidth(oh);
        const double by = stats::silverman_bandwidth(ot);
        auto range = [](const std::vector<double>& a, const std::vector<double>& b, double pad) {
            return std::pair{std::min(*std::min_element(a.begin(), a.end()), *std::min_element(b.begin(), b.end())) - pad,
                             std::max(*std::max_element(a.begin(), a.end()), *std::max_element(b.begin(), b.end())) + pad};
        };
        const auto [x0, x1] = range(oh, sh, 3.0 * bx);
        const auto [y0, y1] = range(ot, st, 3.0 * by);
        const auto xg = linspace(x0, x1, options.grid_points_2d);
        const auto yg = linspace(y0, y1, options.grid_points_2d);
        const auto dobs = kde_2d(oh, ot, xg, yg, bx, by);
        const auto dsim = kde_2d(sh, st, xg, yg, bx, by);
        for (double level : options.contour_levels) {
            report.contours.push_back({f, level, contour_lines(dobs, level), contour_lines(dsim, level)});
        }
    }
    return report;
}

// ---- report ------------------------------------------------------------------

DurationSummary summarize_durations(std::span<const std::int64_t> values) {
    DurationSummary s;
    s.count = values.size();
    s.histogram.assign(kDurationBinEdges.size(), 0.0);
    if (values.empty()) {
        return s;
    }
    std::vector<double> v(values.begin(), values.end());
    s.mean = stats::mean(v);
    s.median = stats::sample_quantile(v, 0.5);
    s.q90 = stats::sample_quantile(v, 0.9);
    for (auto d : values) {
        const auto it = std::upper_bound(kDurationBinEdges.begin(), kDurationBinEdges.end(), d);
        const auto bin = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - kDurationBinEdges.begin() - 1));
        s.histogram[bin] += 1.0;
    }
    for (double& h : s.histogram) {
        h /= static_cast<double>(values.size());
    }
    return s;
}

ValidationReport validate_series(const ingest::HourlySeries& observed, const ingest::HourlySeries& simulated,
                                 const SeasonBoundaries& seasons, const ValidationOptions& options) {
    ValidationReport r;
    r.observed_years = whole_years(observed.size(), "observed series");
    r.simulated_years = whole_years(simulated.size(), "simulated series");
    r.window_years = options.window_years ? options.window_years : r.observed_years;

    r.observed_percentages = season_percentages(observed.regime, seasons);
    r.simulated_percentages = season_percentages(simulated.regime, seasons);
    for (std::size_t s = 0; s < 4; ++s) {
        std::vector<double> a;
        std::vector<double> b;
        for (const auto& row : r.observed_percentages) {
            a.push_back(row[s]);
        }
        for (const auto& row : r.simulated_percentages) {
            b.push_back(row[s]);
        }
        const auto pa = present(a);
        const auto pb = present(b);
        r.percentage_ks_p[s] = (pa.empty() || pb.empty()) ? kNaN : stats::ks_two_sample(pa, pb).p_value;
    }

    for (double q : options.quantiles) {
        ThresholdBlock block;
        block.thresholds = thresholds_from_quantile(observed.hm0, observed.tm02, q);
        const auto obs = extract_storms(observed.hm0, observed.tm02, block.thresholds);
        const auto sim = extract_storms(simulated.hm0, simulated.tm02, block.thresholds);
        block.observed_count = obs.events.size();
        block.simulated_band = storm_count_band(simulated.hm0, simulated.tm02, r.window_years, block.thresholds);
        // scale the observed count to the window length when they differ
        const double scaled = static_cast<double>(block.observed_count) * static_cast<double>(r.window_years) /
                              static_cast<double>(r.observed_years);
        block.observed_in_band = scaled >= block.simulated_band.q05 && scaled <= block.simulated_band.q95;
        const auto od = obs.durations();
        const auto sd = sim.durations();
        block.observed_durations = summarize_durations(od);
        block.simulated_durations = summarize_durations(sd);
        block.observed_interarrivals = summarize_durations(obs.interarrivals);
        block.simulated_interarrivals = summarize_durations(sim.interarrivals);
        auto ks = [](const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
            if (a.empty() || b.empty()) {
                return kNaN;
            }
            const std::vector<double> da(a.begin(), a.end());
            const std::vector<double> db(b.begin(), b.end());
            return stats::ks_two_sample(da, db).p_value;
        };
        block.duration_ks_p = ks(od, sd);
        block.interarrival_ks_p = ks(obs.interarrivals, sim.interarrivals);
        r.storms.push_back(std::move(block));
    }
    r.densities = density_report(observed, simulated, options.density);
    return r;
}

namespace {

using detail::json;
using detail::number_or_null;

json summary_json(const DurationSummary& s) {
    return json{{"count", s.count},
                {"mean", number_or_null(s.mean)},
                {"median", number_or_null(s.median)},
                {"q90", number_or_null(s.q90)},
                {"histogram", s.histogram}};
}

json fractions_json(const std::vector<SeasonFractions>& rows) {
    json out = json::object();
    for (Season s : kAllSeasons) {
        json col = json::array();
        for (const auto& row : rows) {
            col.push_back(number_or_null(row[static_cast<std::size_t>(s)]));
        }
        out[std::string(season_name(s))] = col;
    }
    return out;
}

json polylines_json(const std::vector<Polyline>& lines) {
    json out = json::array();
    for (const auto& l : lines) {
        json pts = json::array();
        for (const auto& p : l) {
            pts.push_back({p[0], p[1]});
        }
        out.push_back(pts);
    }
    return out;
}

} // namespace

std::string report_to_json(const ValidationReport& r, const RunConfig* config) {
    json doc;
    doc["schema_version"] = kReportSchemaVersion;
    doc["generator"] = fmt::format("wavesim {}", library_version());
    if (config) {
        doc["config"] = detail::config_json(*config);
    }
    doc["years"] = {{"observed", r.observed_years}, {"simulated", r.simulated_years}, {"window", r.window_years}};

    json ks = json::object();
    for (Season s : kAllSeasons) {
        ks[std::string(season_name(s))] = number_or_null(r.percentage_ks_p[static_cast<std::size_t>(s)]);
    }
    doc["percentages"] = {{"observed", fractions_json(r.observed_percentages)},
                          {"simulated", fractions_json(r.simulated_percentages)},
                          {"ks_p_value", ks}};

    json blocks = json::array();
    for (const auto& b : r.storms) {
        blocks.push_back({{"quantile", b.thresholds.quantile},
                          {"h_star_m", b.thresholds.h_star},
                          {"t_star_s", b.thresholds.t_star},
                          {"observed_count", b.observed_count},
                          {"simulated_count_q05", b.simulated_band.q05},
                          {"simulated_count_q95", b.simulated_band.q95},
                          {"simulated_counts", b.simulated_band.counts},
                          {"observed_in_band", b.observed_in_band},
                          {"durations",
                           {{"observed", summary_json(b.observed_durations)},
                            {"simulated", summary_json(b.simulated_durations)},
                            {"ks_p_value", number_or_null(b.duration_ks_p)}}},
                          {"interarrivals",
                           {{"observed", summary_json(b.observed_interarrivals)},
                            {"simulated", summary_json(b.simulated_interarrivals)},
                            {"ks_p_value", number_or_null(b.interarrival_ks_p)}}}});
    }
    doc["storms"] = {{"bin_edges_hours", kDurationBinEdges}, {"thresholds", blocks}};

    json curves = json::array();
    for (const auto& c : r.densities.curves) {
        curves.push_back({{"variable", c.variable},
                          {"regime", filter_name(c.filter)},
                          {"bandwidth", c.bandwidth},
                          {"grid", c.grid},
                          {"observed_years", c.observed_years},
                          {"simulated_min", c.simulated_min},
                          {"simulated_max", c.simulated_max},
                          {"coverage", c.coverage}});
    }
    json contours = json::array();
    for (const auto& c : r.densities.contours) {
        contours.push_back({{"regime", filter_name(c.filter)},
                            {"level", c.level},
                            {"x", "hm0_m"},
                            {"y", "tm02_s"},
                            {"observed", polylines_json(c.observed)},
                            {"simulated", polylines_json(c.simulated)}});
    }
    doc["densities"] = {{"curves", curves}, {"contours", contours}};
    return doc.dump(1);
}

} // namespace wavesim::validate
