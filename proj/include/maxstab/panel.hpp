#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "maxstab/climate.hpp"

namespace maxstab {

struct StationRecord {
    std::string id;
    StationCoords coords;
};

// K-years x D-stations matrix of annual maxima plus station metadata.
// Missing cells are NaN; the year labels carry the panel's time axis.
struct MaximaPanel {
    enum class Scale { Raw, Frechet };

    std::vector<StationRecord> stations;  // D entries
    std::vector<int> years;               // K labels, strictly increasing
    std::vector<double> values;           // K*D row-major: values[k*D + i]
    Scale scale_tag = Scale::Raw;

    std::size_t n_stations() const { return stations.size(); }
    std::size_t n_years() const { return years.size(); }

    double at(std::size_t year_idx, std::size_t station_idx) const {
        return values[year_idx * stations.size() + station_idx];
    }
    double& at(std::size_t year_idx, std::size_t station_idx) {
        return values[year_idx * stations.size() + station_idx];
    }
    bool present(std::size_t year_idx, std::size_t station_idx) const {
        return !std::isnan(at(year_idx, station_idx));
    }

    // Index of a station id; throws DataError if unknown.
    std::size_t station_index(const std::string& id) const;

    // Non-missing series of one station (values + matching year labels).
    std::vector<double> station_values(std::size_t station_idx) const;
    std::vector<int> station_years(std::size_t station_idx) const;

    // Unique ids, consistent dimensions, positive values when Frechet-scaled.
    void validate() const;
};

struct Holdout {
    std::vector<std::string> fit_ids;
    std::vector<std::string> validation_ids;
};

// Splits into (fit panel, validation panel); the id sets partition the
// stations and both panels keep the full year axis.
std::pair<MaximaPanel, MaximaPanel> split_holdout(const MaximaPanel& panel,
                                                  const std::vector<std::string>& validation_ids);

}  // namespace maxstab
