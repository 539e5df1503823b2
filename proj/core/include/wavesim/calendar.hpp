#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace wavesim {

/// Every model year has this many hours: 365 days plus a quarter day in February.
inline constexpr std::int64_t kHoursPerYear = 8766;

/// Hours from Jan 1 00:00 to the first extra February hour (Jan + 28 days of Feb).
inline constexpr std::int64_t kFebruaryPadStart = (31 + 28) * 24;
/// Number of extra February hours on the model calendar.
inline constexpr std::int64_t kFebruaryPadHours = 6;

/// Position on the model calendar.
struct ModelClock {
    std::int64_t year_index = 0;
    std::int64_t hour_of_year = 0;

    friend bool operator==(const ModelClock&, const ModelClock&) = default;
};

/// Throws DomainError for negative indices.
ModelClock clock_from_index(std::int64_t absolute_hour);
/// Throws DomainError when hour_of_year is outside [0, kHoursPerYear) or year_index < 0.
std::int64_t index_from_clock(const ModelClock& clock);

enum class Season : std::uint8_t { spring = 0, summer = 1, autumn = 2, winter = 3 };

inline constexpr std::array<Season, 4> kAllSeasons{Season::spring, Season::summer, Season::autumn,
                                                   Season::winter};

std::string_view season_name(Season season);
Season season_from_name(std::string_view name);

/// Start hours (on the model calendar) of spring, summer, autumn and winter.
/// Winter wraps through the year boundary.
struct SeasonBoundaries {
    std::array<std::int64_t, 4> start_hour{};

    /// Meteorological quarters MAM / JJA / SON / DJF.
    static SeasonBoundaries meteorological();

    Season season_of(std::int64_t hour_of_year) const;
    /// Throws ConfigError unless the starts are strictly increasing and inside the year.
    void validate() const;
};

} // namespace wavesim
