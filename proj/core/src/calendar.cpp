#include "wavesim/calendar.hpp"

#include "wavesim/error.hpp"

#include <string>

namespace wavesim {

ModelClock clock_from_index(std::int64_t absolute_hour) {
    if (absolute_hour < 0) {
        throw DomainError("negative absolute hour index " + std::to_string(absolute_hour));
    }
    return {absolute_hour / kHoursPerYear, absolute_hour % kHoursPerYear};
}

std::int64_t index_from_clock(const ModelClock& clock) {
    if (clock.year_index < 0 || clock.hour_of_year < 0 || clock.hour_of_year >= kHoursPerYear) {
        throw DomainError("model clock out of range: year " + std::to_string(clock.year_index) +
                          ", hour " + std::to_string(clock.hour_of_year));
    }
    return clock.year_index * kHoursPerYear + clock.hour_of_year;
}

std::string_view season_name(Season season) {
    switch (season) {
    case Season::spring:
        return "spring";
    case Season::summer:
        return "summer";
    case Season::autumn:
        return "autumn";
    case Season::winter:
        return "winter";
    }
    return "unknown";
}

Season season_from_name(std::string_view name) {
    for (Season s : kAllSeasons) {
        if (season_name(s) == name) {
            return s;
        }
    }
    throw FormatError("unknown season name '" + std::string(name) + "'");
}

SeasonBoundaries SeasonBoundaries::meteorological() {
    // March, June, September and December 1st on the 8766-hour calendar.
    return SeasonBoundaries{{1422, 3630, 5838, 8022}};
}

Season SeasonBoundaries::season_of(std::int64_t hour_of_year) const {
    if (hour_of_year < start_hour[0] || hour_of_year >= start_hour[3]) {
        return Season::winter;
    }
    if (hour_of_year < start_hour[1]) {
        return Season::spring;
    }
    if (hour_of_year < start_hour[2]) {
        return Season::summer;
    }
    return Season::autumn;
}

void SeasonBoundaries::validate() const {
    for (std::size_t i = 0; i < start_hour.size(); ++i) {
        if (start_hour[i] < 0 || start_hour[i] >= kHoursPerYear) {
            throw ConfigError("season start hour out of range: " + std::to_string(start_hour[i]));
        }
        if (i > 0 && start_hour[i] <= start_hour[i - 1]) {
            throw ConfigError("season start hours must be strictly increasing");
        }
    }
}

} // namespace wavesim
