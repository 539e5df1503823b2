#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace wavesim::ingest {

/// One row of the hourly observation CSV. `timestamp` is seconds since the
/// Unix epoch (UTC).
struct RawRecord {
    std::int64_t timestamp = 0;
    std::optional<double> hm0;
    std::optional<double> tm02;
    std::optional<double> dir;
};

struct ParsedCsv {
    std::vector<RawRecord> records;
    /// Cells that were present but not parseable (or physically impossible)
    /// and were therefore read as missing.
    std::size_t malformed_cells = 0;
};

/// Reads `timestamp,hm0_m,tm02_s,dir_deg` (any column order, extra columns
/// ignored). Throws FormatError on a missing header column, an unparseable
/// timestamp, a timestamp off the hour, or non-increasing timestamps.
ParsedCsv parse_csv(std::istream& in);
/// Throws IoError when the file cannot be opened.
ParsedCsv parse_csv_file(const std::filesystem::path& path);

/// "2003-01-01T00:00:00Z" and friends. Throws FormatError.
std::int64_t parse_timestamp(const std::string& text);
std::string format_timestamp(std::int64_t seconds);

inline constexpr std::int8_t kMissingRegime = -1;
inline constexpr std::int8_t kRegimeNorth = 0;
inline constexpr std::int8_t kRegimeSouthwest = 1;

/// Clock-aligned joint record. NaN marks a missing height or period,
/// kMissingRegime a missing regime.
struct HourlySeries {
    std::vector<double> hm0;
    std::vector<double> tm02;
    std::vector<std::int8_t> regime;
    int origin_year = 0;
    std::string source_id;

    std::size_t size() const { return hm0.size(); }
    bool empty() const { return hm0.empty(); }
    /// Number of whole model years covered; throws SizeError if partial.
    std::size_t whole_years() const;

    bool hm0_missing(std::size_t i) const;
    bool tm02_missing(std::size_t i) const;
    bool regime_missing(std::size_t i) const { return regime[i] == kMissingRegime; }
    bool joint_present(std::size_t i) const { return !hm0_missing(i) && !tm02_missing(i); }

    /// Throws SizeError on ragged arrays, DomainError on hm0 < 0 or tm02 <= 0.
    void validate() const;
};

/// Maps whole civil years onto the 8766-hour model calendar. Non-leap years
/// get six missing hours after Feb 28; in leap years only the first six hours
/// of Feb 29 are kept. Hours without a record are missing.
HourlySeries to_model_calendar(std::span<const RawRecord> records, std::string source_id = {});

/// 0 (north) for directions in the open sector (304, 48) wrapping through
/// north, 1 (southwest) for [48, 304]. Throws DomainError outside [0, 360).
std::int8_t derive_regime(double dir_deg);

/// Fills interior gaps of at most `max_gap` hours: heights and periods
/// linearly, regimes by nearest neighbour (ties take the preceding value).
/// Gaps touching either end of the series are left alone.
HourlySeries interpolate_short_gaps(HourlySeries series, int max_gap = 5);

} // namespace wavesim::ingest
