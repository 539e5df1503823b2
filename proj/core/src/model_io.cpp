#include "detail/json_io.hpp"
#include "wavesim/error.hpp"
#include "wavesim/pipeline.hpp"
#include "wavesim/rng.hpp"

#include <fmt/format.h>

#include <fstream>
#include <sstream>

namespace wavesim::pipeline {

namespace {

using detail::json;

constexpr std::string_view kFormatTag = "wavesim-model";

json skew_t_json(const stats::SkewTParams& p) {
    return json{{"mu", p.mu}, {"sigma", p.sigma}, {"skew", p.skew}, {"shape", p.shape}};
}

stats::SkewTParams skew_t_from_json(const json& j) {
    return {j.at("mu").get<double>(), j.at("sigma").get<double>(), j.at("skew").get<double>(),
            j.at("shape").get<double>()};
}

json arma_json(const arma::ArmaModel& m) {
    json se = json::array();
    for (double v : m.standard_errors) {
        se.push_back(detail::number_or_null(v));
    }
    return json{{"ar", m.ar},
                {"ma", m.ma},
                {"intercept", m.intercept},
                {"sigma2", m.sigma2},
                {"log_likelihood", detail::number_or_null(m.log_likelihood)},
                {"standard_errors", se}};
}

arma::ArmaModel arma_from_json(const json& j) {
    arma::ArmaModel m;
    m.ar = j.at("ar").get<std::vector<double>>();
    m.ma = j.at("ma").get<std::vector<double>>();
    m.intercept = j.at("intercept").get<double>();
    m.sigma2 = j.at("sigma2").get<double>();
    m.log_likelihood = detail::number_or_nan(j.at("log_likelihood"));
    for (const auto& v : j.at("standard_errors")) {
        m.standard_errors.push_back(detail::number_or_nan(v));
    }
    return m;
}

std::vector<double> sorted_copy(std::span<const double> s) { return {s.begin(), s.end()}; }

json body_json(const FittedModel& m) {
    json body;
    body["steepness"] = {{"a", m.steepness.a},
                         {"b", m.steepness.b},
                         {"c", m.steepness.c},
                         {"adjusted_r2", detail::number_or_null(m.steepness.adjusted_r2)},
                         {"rmse", detail::number_or_null(m.steepness.rmse)},
                         {"units", "a dimensionless; b, c in m"}};
    body["margins"] = {{"hm0", sorted_copy(m.hm0_cdf.sorted_sample())},
                       {"tm02_detrended", sorted_copy(m.tm02_detrended_cdf.sorted_sample())},
                       {"plotting_position", "rank/(n+1)"}};

    json coefs = json::array();
    for (int i = 0; i < seasonal::kCoefficientCount; ++i) {
        coefs.push_back({{"name", seasonal::coefficient_name(i)},
                         {"mean", m.coefficients.mean[static_cast<std::size_t>(i)]},
                         {"sd", m.coefficients.sd[static_cast<std::size_t>(i)]}});
    }
    json corr = json::array();
    for (const auto& c : m.coefficients.correlations) {
        corr.push_back(
            {{"a", seasonal::coefficient_name(c.i)}, {"b", seasonal::coefficient_name(c.j)}, {"rho", c.rho}});
    }
    body["seasonal"] = {{"coefficients", coefs}, {"correlations", corr}};

    body["arma"] = {{"hm0", arma_json(m.hm0_arma)}, {"tm02", arma_json(m.tm02_arma)}};

    json res;
    for (std::size_t k = 0; k < 2; ++k) {
        const auto& law = m.residuals.regimes[k];
        res[fmt::format("regime_{}", k)] = {{"hm0", skew_t_json(law.hm0)},
                                            {"tm02", skew_t_json(law.tm02)},
                                            {"copula", detail::copula_json(law.copula)}};
    }
    res["parameterization"] = "skew-t: mu = mean, sigma = standard deviation, skew = xi, shape = degrees of freedom";
    body["residuals"] = res;

    json by_season;
    for (Season s : kAllSeasons) {
        const auto& sm = m.renewal.season(s);
        by_season[std::string(season_name(s))] = {
            {"north_durations", std::vector<std::int64_t>(sm.north.sorted().begin(), sm.north.sorted().end())},
            {"southwest_durations",
             std::vector<std::int64_t>(sm.southwest.sorted().begin(), sm.southwest.sorted().end())},
            {"north_then_southwest", detail::copula_json(sm.north_then_southwest)},
            {"southwest_then_north", detail::copula_json(sm.southwest_then_north)}};
    }
    body["renewal"] = {{"seasons", detail::seasons_json(m.renewal.seasons)}, {"by_season", by_season}};
    body["config"] = detail::config_json(m.config);
    body["provenance"] = {{"source_id", m.provenance.source_id},
                          {"origin_year", m.provenance.origin_year},
                          {"years", m.provenance.years},
                          {"library_version", m.provenance.library_version},
                          {"fitted_at", m.provenance.fitted_at}};
    return body;
}

const json& section(const json& body, std::string_view name) {
    const auto it = body.find(std::string(name));
    if (it == body.end()) {
        throw SchemaError(fmt::format("model file is missing the '{}' section", name));
    }
    return *it;
}

FittedModel model_from_body(const json& body) {
    FittedModel m;
    const auto& st = section(body, "steepness");
    m.steepness.a = st.at("a").get<double>();
    m.steepness.b = st.at("b").get<double>();
    m.steepness.c = st.at("c").get<double>();
    m.steepness.adjusted_r2 = detail::number_or_nan(st.at("adjusted_r2"));
    m.steepness.rmse = detail::number_or_nan(st.at("rmse"));

    const auto& mg = section(body, "margins");
    m.hm0_cdf = stats::EmpiricalCdf(mg.at("hm0").get<std::vector<double>>());
    m.tm02_detrended_cdf = stats::EmpiricalCdf(mg.at("tm02_detrended").get<std::vector<double>>());

    const auto& se = section(body, "seasonal");
    for (const auto& c : se.at("coefficients")) {
        const auto i = static_cast<std::size_t>(seasonal::coefficient_from_name(c.at("name").get<std::string>()));
        m.coefficients.mean[i] = c.at("mean").get<double>();
        m.coefficients.sd[i] = c.at("sd").get<double>();
    }
    for (const auto& c : se.at("correlations")) {
        m.coefficients.correlations.push_back({seasonal::coefficient_from_name(c.at("a").get<std::string>()),
                                               seasonal::coefficient_from_name(c.at("b").get<std::string>()),
                                               c.at("rho").get<double>()});
    }

    const auto& ar = section(body, "arma");
    m.hm0_arma = arma_from_json(ar.at("hm0"));
    m.tm02_arma = arma_from_json(ar.at("tm02"));

    const auto& res = section(body, "residuals");
    for (std::size_t k = 0; k < 2; ++k) {
        const auto& r = res.at(fmt::format("regime_{}", k));
        auto& law = m.residuals.regimes[k];
        law.hm0 = skew_t_from_json(r.at("hm0"));
        law.tm02 = skew_t_from_json(r.at("tm02"));
        law.copula = detail::copula_from_json(r.at("copula"));
    }

    const auto& rn = section(body, "renewal");
    m.renewal.seasons = detail::seasons_from_json(rn.at("seasons"));
    for (Season s : kAllSeasons) {
        const auto& js = rn.at("by_season").at(std::string(season_name(s)));
        auto& sm = m.renewal.by_season[static_cast<std::size_t>(s)];
        sm.north = renewal::DurationMargin(js.at("north_durations").get<std::vector<std::int64_t>>());
        sm.southwest = renewal::DurationMargin(js.at("southwest_durations").get<std::vector<std::int64_t>>());
        sm.north_then_southwest = detail::copula_from_json(js.at("north_then_southwest"));
        sm.southwest_then_north = detail::copula_from_json(js.at("southwest_then_north"));
    }

    m.config = detail::config_from_json(section(body, "config"));
    const auto& pv = section(body, "provenance");
    m.provenance.source_id = pv.at("source_id").get<std::string>();
    m.provenance.origin_year = pv.at("origin_year").get<int>();
    m.provenance.years = pv.at("years").get<std::size_t>();
    m.provenance.library_version = pv.at("library_version").get<std::string>();
    m.provenance.fitted_at = pv.at("fitted_at").get<std::string>();
    return m;
}

} // namespace

std::string diagnostics_to_json(const FitResult& result) {
    const auto& m = result.model;
    const auto& d = result.diagnostics;
    auto whiteness = [](const arma::LjungBox& lb) {
        return json{{"statistic", detail::number_or_null(lb.statistic)},
                    {"p_value", detail::number_or_null(lb.p_value)},
                    {"lags", lb.lags},
                    {"degrees_of_freedom", lb.degrees_of_freedom}};
    };
    json r2 = json::array();
    for (const auto& row : d.fourier_r2) {
        json y = json::array();
        for (double v : row) {
            y.push_back(detail::number_or_null(v));
        }
        r2.push_back(y);
    }
    json residual = json::array();
    for (std::size_t k = 0; k < 2; ++k) {
        const auto& rep = d.residual_fit.report[k];
        residual.push_back({{"regime", k},
                            {"pairs", rep.pairs},
                            {"empirical_tau", rep.empirical_tau},
                            {"copula", m.residuals.regimes[k].copula.describe()},
                            {"copula_tau", copula::model_tau(m.residuals.regimes[k].copula)},
                            {"copula_aic", rep.copula_aic},
                            {"hm0_shape_at_boundary", rep.hm0_shape_at_boundary},
                            {"tm02_shape_at_boundary", rep.tm02_shape_at_boundary}});
    }
    json renewal = json::object();
    for (Season s : kAllSeasons) {
        const auto& rep = d.renewal[static_cast<std::size_t>(s)];
        const auto& sm = m.renewal.season(s);
        renewal[std::string(season_name(s))] = {{"north_runs", rep.north_runs},
                                                {"southwest_runs", rep.southwest_runs},
                                                {"ns_pairs", rep.ns_pairs},
                                                {"sn_pairs", rep.sn_pairs},
                                                {"ns_empirical_tau", rep.ns_empirical_tau},
                                                {"sn_empirical_tau", rep.sn_empirical_tau},
                                                {"ns_copula", sm.north_then_southwest.describe()},
                                                {"sn_copula", sm.southwest_then_north.describe()},
                                                {"ns_aic", rep.ns_aic},
                                                {"sn_aic", rep.sn_aic}};
    }
    json doc;
    doc["generator"] = fmt::format("wavesim {}", m.provenance.library_version);
    doc["model_hash"] = model_fingerprint(m);
    doc["config"] = detail::config_json(m.config);
    doc["ingest"] = {{"years", m.provenance.years},
                     {"origin_year", m.provenance.origin_year},
                     {"gap_filled_hours", d.gap_filled_hours},
                     {"anomalies_masked", d.anomalies_masked}};
    doc["steepness"] = {{"a", m.steepness.a},
                        {"b", m.steepness.b},
                        {"c", m.steepness.c},
                        {"adjusted_r2", detail::number_or_null(m.steepness.adjusted_r2)},
                        {"rmse", detail::number_or_null(m.steepness.rmse)}};
    doc["seasonal"] = {{"processes", {"mu_hm0", "sigma_hm0", "mu_tm02", "sigma_tm02"}},
                       {"fourier_r2", r2},
                       {"fourier_r2_ok", d.fourier_r2_ok},
                       {"significant_correlations", m.coefficients.correlations.size()}};
    doc["arma"] = {{"hm0", arma_json(m.hm0_arma)},
                   {"tm02", arma_json(m.tm02_arma)},
                   {"hm0_whiteness", whiteness(d.hm0_whiteness)},
                   {"tm02_whiteness", whiteness(d.tm02_whiteness)}};
    doc["residuals"] = residual;
    doc["renewal"] = {{"censored_runs", d.censored_runs}, {"by_season", renewal}};
    return doc.dump(1);
}

std::string body_checksum(const std::string& canonical_body) {
    return fmt::format("{:016x}", fnv1a64(canonical_body));
}

std::string model_to_json(const FittedModel& model) {
    const json body = body_json(model);
    json doc;
    doc["format"] = kFormatTag;
    doc["schema_version"] = kModelSchemaVersion;
    doc["checksum"] = body_checksum(body.dump());
    doc["body"] = body;
    return doc.dump(1);
}

std::string model_fingerprint(const FittedModel& model) { return body_checksum(body_json(model).dump()); }

FittedModel model_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError(fmt::format("model file is not valid JSON: {}", e.what()));
    }
    if (!doc.is_object() || doc.value("format", "") != kFormatTag) {
        throw SchemaError("not a wavesim model file");
    }
    const int version = doc.value("schema_version", -1);
    if (version != kModelSchemaVersion) {
        throw SchemaError(fmt::format("model schema version {} is not supported (expected {})", version,
                                      kModelSchemaVersion));
    }
    if (!doc.contains("body") || !doc["body"].is_object()) {
        throw SchemaError("model file is missing the 'body' section");
    }
    const auto& body = doc["body"];
    if (doc.value("checksum", "") != body_checksum(body.dump())) {
        throw SchemaError("model file checksum mismatch; the body was modified");
    }
    FittedModel m;
    try {
        m = model_from_body(body);
    } catch (const json::exception& e) {
        throw SchemaError(fmt::format("model file has an invalid field: {}", e.what()));
    }
    m.validate();
    return m;
}

void save_model(const FittedModel& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError(fmt::format("cannot write model file '{}'", path.string()));
    }
    out << model_to_json(model) << '\n';
    if (!out) {
        throw IoError(fmt::format("error while writing model file '{}'", path.string()));
    }
}

FittedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError(fmt::format("cannot open model file '{}'", path.string()));
    }
    std::ostringstream text;
    text << in.rdbuf();
    return model_from_json(text.str());
}

} // namespace wavesim::pipeline
