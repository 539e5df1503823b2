#include "wavesim/ingest.hpp"

#include "wavesim/calendar.hpp"
#include "wavesim/error.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>

namespace wavesim::ingest {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Howard Hinnant's days_from_civil.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m > 2 ? m - 3 : m + 9) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

struct CivilDate {
    std::int64_t year;
    unsigned month;
    unsigned day;
};

CivilDate civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const auto doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp < 10 ? mp + 3 : mp - 9;
    return {y + (m <= 2), m, d};
}

bool is_leap(std::int64_t y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        cells.push_back(trim(cell));
    }
    if (!line.empty() && line.back() == ',') {
        cells.emplace_back();
    }
    return cells;
}

// Empty -> nullopt. Unparseable or failing `valid` -> nullopt and ++malformed.
template <typename Pred>
std::optional<double> parse_cell(const std::string& cell, Pred valid, std::size_t& malformed) {
    if (cell.empty()) {
        return std::nullopt;
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(value) || !valid(value)) {
        ++malformed;
        return std::nullopt;
    }
    return value;
}

} // namespace

std::int64_t parse_timestamp(const std::string& text) {
    int y = 0;
    unsigned mo = 0;
    unsigned d = 0;
    unsigned h = 0;
    unsigned mi = 0;
    unsigned s = 0;
    char tail[8] = {0};
    const int n = std::sscanf(text.c_str(), "%d-%u-%uT%u:%u:%u%7s", &y, &mo, &d, &h, &mi, &s, tail);
    if (n < 6) {
        throw FormatError("unparseable timestamp '" + text + "'");
    }
    const std::string zone = n == 7 ? std::string(tail) : std::string();
    if (!(zone.empty() || zone == "Z" || zone == "+00:00")) {
        throw FormatError("timestamp must be UTC: '" + text + "'");
    }
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || s > 59) {
        throw FormatError("timestamp field out of range: '" + text + "'");
    }
    const std::int64_t days = days_from_civil(y, mo, d);
    if (civil_from_days(days).day != d) {
        throw FormatError("no such calendar date: '" + text + "'");
    }
    return days * 86400 + h * 3600 + mi * 60 + s;
}

std::string format_timestamp(std::int64_t seconds) {
    const std::int64_t days = seconds >= 0 ? seconds / 86400 : (seconds - 86399) / 86400;
    const std::int64_t rem = seconds - days * 86400;
    const CivilDate c = civil_from_days(days);
    return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}Z", c.year, c.month, c.day, rem / 3600, (rem / 60) % 60,
                       rem % 60);
}

ParsedCsv parse_csv(std::istream& in) {
    if (!in) {
        throw IoError("input stream is not readable");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw FormatError("empty input: missing header row");
    }
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) {
        line.erase(0, 3); // UTF-8 BOM
    }
    const auto header = split_commas(line);
    auto column = [&](const char* name) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) {
                return i;
            }
        }
        throw FormatError(std::string("missing mandatory header column '") + name + "'");
    };
    const std::size_t c_time = column("timestamp");
    const std::size_t c_hm0 = column("hm0_m");
    const std::size_t c_tm02 = column("tm02_s");
    const std::size_t c_dir = column("dir_deg");

    ParsedCsv out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        auto cells = split_commas(line);
        cells.resize(std::max(cells.size(), header.size()));
        RawRecord rec;
        try {
            rec.timestamp = parse_timestamp(cells[c_time]);
        } catch (const FormatError& e) {
            throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
        }
        if (rec.timestamp % 3600 != 0) {
            throw FormatError("line " + std::to_string(line_no) + ": timestamp not on the hour");
        }
        if (!out.records.empty() && rec.timestamp <= out.records.back().timestamp) {
            throw FormatError("line " + std::to_string(line_no) +
                              ": timestamps must be strictly increasing");
        }
        rec.hm0 = parse_cell(cells[c_hm0], [](double v) { return v >= 0.0; }, out.malformed_cells);
        rec.tm02 = parse_cell(cells[c_tm02], [](double v) { return v > 0.0; }, out.malformed_cells);
        rec.dir = parse_cell(cells[c_dir], [](double v) { return v >= 0.0 && v < 360.0; },
                             out.malformed_cells);
        out.records.push_back(rec);
    }
    if (in.bad()) {
        throw IoError("read error on input stream");
    }
    return out;
}

ParsedCsv parse_csv_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "'");
    }
    return parse_csv(in);
}

std::size_t HourlySeries::whole_years() const {
    if (size() % kHoursPerYear != 0) {
        throw SizeError("series length " + std::to_string(size()) + " is not a whole number of model years");
    }
    return size() / kHoursPerYear;
}

bool HourlySeries::hm0_missing(std::size_t i) const { return std::isnan(hm0[i]); }
bool HourlySeries::tm02_missing(std::size_t i) const { return std::isnan(tm02[i]); }

void HourlySeries::validate() const {
    if (tm02.size() != hm0.size() || regime.size() != hm0.size()) {
        throw SizeError("hourly series arrays differ in length");
    }
    for (std::size_t i = 0; i < size(); ++i) {
        if (!hm0_missing(i) && hm0[i] < 0.0) {
            throw DomainError("negative hm0 at hour " + std::to_string(i));
        }
        if (!tm02_missing(i) && !(tm02[i] > 0.0)) {
            throw DomainError("non-positive tm02 at hour " + std::to_string(i));
        }
        if (regime[i] != kMissingRegime && regime[i] != kRegimeNorth && regime[i] != kRegimeSouthwest) {
            throw DomainError("invalid regime code at hour " + std::to_string(i));
        }
    }
}

HourlySeries to_model_calendar(std::span<const RawRecord> records, std::string source_id) {
    HourlySeries out;
    out.source_id = std::move(source_id);
    if (records.empty()) {
        return out;
    }
    const std::int64_t first = records.front().timestamp;
    const std::int64_t last = records.back().timestamp;
    const CivilDate first_date = civil_from_days(first / 86400);
    const CivilDate last_date = civil_from_days(last / 86400);
    const bool starts_on_year = first_date.month == 1 && first_date.day == 1 && first % 86400 == 0;
    const bool ends_on_year = last_date.month == 12 && last_date.day == 31 && last % 86400 == 23 * 3600;
    if (!starts_on_year || !ends_on_year) {
        throw FormatError("records must span whole civil years; got " + format_timestamp(first) +
                          " .. " + format_timestamp(last) +
                          " (expected YYYY-01-01T00:00:00Z .. YYYY-12-31T23:00:00Z)");
    }
    const std::int64_t y0 = first_date.year;
    const std::int64_t years = last_date.year - y0 + 1;
    out.origin_year = static_cast<int>(y0);
    const auto n = static_cast<std::size_t>(years * kHoursPerYear);
    out.hm0.assign(n, kNaN);
    out.tm02.assign(n, kNaN);
    out.regime.assign(n, kMissingRegime);

    for (const RawRecord& rec : records) {
        const std::int64_t days = rec.timestamp / 86400;
        const CivilDate date = civil_from_days(days);
        const std::int64_t hour_of_civil_year =
            (days - days_from_civil(date.year, 1, 1)) * 24 + (rec.timestamp % 86400) / 3600;
        std::int64_t model_hour = hour_of_civil_year;
        if (hour_of_civil_year >= kFebruaryPadStart) {
            if (is_leap(date.year)) {
                const std::int64_t feb29_end = kFebruaryPadStart + 24;
                if (hour_of_civil_year < feb29_end) {
                    if (hour_of_civil_year >= kFebruaryPadStart + kFebruaryPadHours) {
                        continue; // last 18 hours of Feb 29 are dropped
                    }
                } else {
                    model_hour = hour_of_civil_year - (24 - kFebruaryPadHours);
                }
            } else {
                model_hour = hour_of_civil_year + kFebruaryPadHours;
            }
        }
        const auto idx = static_cast<std::size_t>((date.year - y0) * kHoursPerYear + model_hour);
        if (rec.hm0) {
            out.hm0[idx] = *rec.hm0;
        }
        if (rec.tm02) {
            out.tm02[idx] = *rec.tm02;
        }
        if (rec.dir) {
            out.regime[idx] = derive_regime(*rec.dir);
        }
    }
    return out;
}

std::int8_t derive_regime(double dir_deg) {
    if (!(dir_deg >= 0.0 && dir_deg < 360.0)) {
        throw DomainError("direction outside [0, 360): " + std::to_string(dir_deg));
    }
    return (dir_deg >= 48.0 && dir_deg <= 304.0) ? kRegimeSouthwest : kRegimeNorth;
}

HourlySeries interpolate_short_gaps(HourlySeries series, int max_gap) {
    if (max_gap < 1) {
        throw DomainError("max_gap must be at least 1 hour");
    }
    const std::size_t n = series.size();
    const auto gap_limit = static_cast<std::size_t>(max_gap);

    auto fill_linear = [&](std::vector<double>& v) {
        std::size_t i = 0;
        while (i < n) {
            if (!std::isnan(v[i])) {
                ++i;
                continue;
            }
            std::size_t j = i;
            while (j < n && std::isnan(v[j])) {
                ++j;
            }
            const std::size_t len = j - i;
            if (i > 0 && j < n && len <= gap_limit) {
                const double a = v[i - 1];
                const double b = v[j];
                for (std::size_t k = i; k < j; ++k) {
                    const double w = static_cast<double>(k - i + 1) / static_cast<double>(len + 1);
                    v[k] = a + w * (b - a);
                }
            }
            i = j;
        }
    };
    fill_linear(series.hm0);
    fill_linear(series.tm02);

    auto& r = series.regime;
    std::size_t i = 0;
    while (i < n) {
        if (r[i] != kMissingRegime) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < n && r[j] == kMissingRegime) {
            ++j;
        }
        const std::size_t len = j - i;
        if (i > 0 && j < n && len <= gap_limit) {
            const std::int8_t before = r[i - 1];
            const std::int8_t after = r[j];
            for (std::size_t k = i; k < j; ++k) {
                const std::size_t dist_before = k - (i - 1);
                const std::size_t dist_after = j - k;
                r[k] = dist_before <= dist_after ? before : after;
            }
        }
        i = j;
    }
    return series;
}

} // namespace wavesim::ingest
