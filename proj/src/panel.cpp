#include "maxstab/panel.hpp"

#include <algorithm>
#include <unordered_set>

#include "maxstab/errors.hpp"

namespace maxstab {

std::size_t MaximaPanel::station_index(const std::string& id) const {
    for (std::size_t i = 0; i < stations.size(); ++i)
        if (stations[i].id == id) return i;
    throw DataError("unknown station id: '" + id + "'");
}

std::vector<double> MaximaPanel::station_values(std::size_t station_idx) const {
    std::vector<double> out;
    out.reserve(n_years());
    for (std::size_t k = 0; k < n_years(); ++k)
        if (present(k, station_idx)) out.push_back(at(k, station_idx));
    return out;
}

std::vector<int> MaximaPanel::station_years(std::size_t station_idx) const {
    std::vector<int> out;
    out.reserve(n_years());
    for (std::size_t k = 0; k < n_years(); ++k)
        if (present(k, station_idx)) out.push_back(years[k]);
    return out;
}

void MaximaPanel::validate() const {
    if (values.size() != n_stations() * n_years())
        throw DataError("panel: matrix size inconsistent with stations x years");
    std::unordered_set<std::string> seen;
    for (const auto& s : stations) {
        if (!seen.insert(s.id).second) throw DataError("panel: duplicate station id '" + s.id + "'");
        if (!std::isfinite(s.coords.lon) || !std::isfinite(s.coords.lat) ||
            !std::isfinite(s.coords.elev) || !std::isfinite(s.coords.region_signed_dist))
            throw DataError("panel: non-finite coordinates for station '" + s.id + "'");
    }
    if (std::adjacent_find(years.begin(), years.end(), std::greater_equal<int>()) != years.end())
        throw DataError("panel: year labels must be strictly increasing");
    if (scale_tag == Scale::Frechet) {
        for (double v : values)
            if (!std::isnan(v) && !(v > 0.0))
                throw DataError("panel: Frechet-scaled values must be > 0");
    }
}

std::pair<MaximaPanel, MaximaPanel> split_holdout(const MaximaPanel& panel,
                                                  const std::vector<std::string>& validation_ids) {
    std::unordered_set<std::string> vset;
    for (const auto& id : validation_ids) {
        panel.station_index(id);  // throws on unknown id
        if (!vset.insert(id).second) throw DataError("split_holdout: duplicate validation id '" + id + "'");
    }
    MaximaPanel fit, val;
    fit.years = val.years = panel.years;
    fit.scale_tag = val.scale_tag = panel.scale_tag;
    std::vector<std::size_t> fit_idx, val_idx;
    for (std::size_t i = 0; i < panel.n_stations(); ++i) {
        if (vset.count(panel.stations[i].id)) {
            val.stations.push_back(panel.stations[i]);
            val_idx.push_back(i);
        } else {
            fit.stations.push_back(panel.stations[i]);
            fit_idx.push_back(i);
        }
    }
    auto copy_cols = [&](MaximaPanel& dst, const std::vector<std::size_t>& idx) {
        dst.values.resize(dst.n_stations() * dst.n_years());
        for (std::size_t k = 0; k < panel.n_years(); ++k)
            for (std::size_t j = 0; j < idx.size(); ++j)
                dst.at(k, j) = panel.at(k, idx[j]);
    };
    copy_cols(fit, fit_idx);
    copy_cols(val, val_idx);
    return {std::move(fit), std::move(val)};
}

}  // namespace maxstab
