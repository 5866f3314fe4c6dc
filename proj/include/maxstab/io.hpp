#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "maxstab/gev.hpp"
#include "maxstab/model.hpp"
#include "maxstab/panel.hpp"
#include "maxstab/simulate.hpp"

namespace maxstab {

using nlohmann::json;

// Written into every output file so a result can be traced back to the exact
// config document and seed that produced it.
struct Provenance {
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
};

std::uint64_t fnv1a64(std::string_view bytes);
std::string provenance_comment(const Provenance& p);
json provenance_json(const Provenance& p);

// Shortest round-trip decimal representation (17 significant digits are
// never needed unless required); NaN prints as "nan".
std::string format_double(double v);

// CSV schemas (UTF-8, comma separated, header row required, '#' comment
// lines ignored):
//   stations: station_id,lon_km,lat_km,elev_km,region_signed_dist_km,mean_level
//   panel:    year,station_id,value   (long form; blank value = missing;
//             a "# scale=frechet" directive marks transformed panels)
std::vector<StationRecord> load_stations(const std::filesystem::path& stations_csv);
MaximaPanel load_panel(const std::filesystem::path& panel_csv,
                       const std::filesystem::path& stations_csv);
void save_panel(const MaximaPanel& panel, const std::filesystem::path& panel_csv,
                const std::filesystem::path& stations_csv, const Provenance& prov);

json model_spec_to_json(const ModelSpec& spec);
ModelSpec model_spec_from_json(const json& j);

json fit_result_to_json(const FitResult& fit, const ModelSpec& spec, const Provenance& prov);
FittedModel fitted_model_from_json(const json& j);

// Station layout for synthetic datasets: uniform stations on a box with a
// straight east-west region border at border_lat when two_regions is set.
struct LayoutSpec {
    int n_stations = 100;
    double lon_min = 0.0, lon_max = 300.0;  // km
    double lat_min = 0.0, lat_max = 200.0;  // km
    double elev_min = 0.25, elev_max = 2.5;  // km
    bool two_regions = false;
    double border_lat = 100.0;  // km; region_signed_dist = lat - border_lat
    // mean_level = base + slope * elev + noise
    double mean_level_base = 30.0;
    double mean_level_elev_slope = 20.0;
    double mean_level_noise = 5.0;
};

std::vector<StationRecord> synth_layout(const LayoutSpec& layout, std::uint64_t seed);

enum class MarginMode { Frechet, Gev };

struct SynthResult {
    MaximaPanel panel;
    std::vector<GevParams> margins;  // per station, only for MarginMode::Gev
    json truth;                      // ground-truth record
};

// Panel simulated from the given model at a synthetic layout. With
// MarginMode::Gev the unit-Frechet field is back-transformed through random
// per-station GEV margins (recorded in the truth document).
SynthResult synth_dataset(const FittedModel& truth, const LayoutSpec& layout, int n_years,
                          int first_year, std::uint64_t seed,
                          MarginMode margins = MarginMode::Frechet);

}  // namespace maxstab
