#include "maxstab/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "maxstab/errors.hpp"
#include "maxstab/rng.hpp"

namespace maxstab {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s, const std::string& where) {
    double v = 0.0;
    const char* b = s.data();
    const char* e = b + s.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc{} || p != e)
        throw DataError(where + ": non-numeric cell '" + s + "'");
    return v;
}

int parse_int(const std::string& s, const std::string& where) {
    int v = 0;
    const char* b = s.data();
    const char* e = b + s.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc{} || p != e)
        throw DataError(where + ": non-integer cell '" + s + "'");
    return v;
}

void expect_header(const std::vector<std::string>& got, const std::vector<std::string>& want,
                   const std::string& where) {
    for (std::size_t i = 0; i < want.size(); ++i) {
        if (i >= got.size() || got[i] != want[i])
            throw DataError(where + ": malformed header, expected column " +
                            std::to_string(i + 1) + " to be '" + want[i] + "'" +
                            (i < got.size() ? " but found '" + got[i] + "'" : ""));
    }
    if (got.size() != want.size())
        throw DataError(where + ": malformed header, unexpected extra column '" +
                        got[want.size()] + "'");
}

struct CsvReader {
    std::ifstream in;
    std::string name;
    int line_no = 0;
    bool scale_frechet = false;

    explicit CsvReader(const std::filesystem::path& path) : in(path), name(path.string()) {
        if (!in) throw DataError("cannot open '" + name + "'");
    }

    // Next non-comment line; directive comments are interpreted on the way.
    bool next(std::string& line) {
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            if (line[0] == '#') {
                if (line.find("scale=frechet") != std::string::npos) scale_frechet = true;
                continue;
            }
            return true;
        }
        return false;
    }

    std::string where() const { return name + ":" + std::to_string(line_no); }
};

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x00000100000001B3ULL;
    }
    return h;
}

std::string provenance_comment(const Provenance& p) {
    std::ostringstream os;
    os << "# config_hash=" << std::hex << p.config_hash << std::dec << " seed=" << p.seed;
    return os.str();
}

json provenance_json(const Provenance& p) {
    std::ostringstream os;
    os << std::hex << p.config_hash;
    return json{{"config_hash", os.str()}, {"seed", p.seed}};
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, p);
}

std::vector<StationRecord> load_stations(const std::filesystem::path& stations_csv) {
    std::vector<StationRecord> stations;
    CsvReader r(stations_csv);
    std::string line;
    if (!r.next(line)) throw DataError(r.name + ": empty stations file");
    expect_header(split_csv(line),
                  {"station_id", "lon_km", "lat_km", "elev_km", "region_signed_dist_km",
                   "mean_level"},
                  r.where());
    while (r.next(line)) {
        const auto cells = split_csv(line);
        if (cells.size() != 6)
            throw DataError(r.where() + ": expected 6 cells, got " + std::to_string(cells.size()));
        StationRecord s;
        s.id = cells[0];
        if (s.id.empty()) throw DataError(r.where() + ": empty station id");
        s.coords.lon = parse_double(cells[1], r.where());
        s.coords.lat = parse_double(cells[2], r.where());
        s.coords.elev = parse_double(cells[3], r.where());
        s.coords.region_signed_dist = parse_double(cells[4], r.where());
        if (!cells[5].empty()) s.coords.mean_level = parse_double(cells[5], r.where());
        for (const auto& other : stations)
            if (other.id == s.id)
                throw DataError(r.where() + ": duplicate station id '" + s.id + "'");
        stations.push_back(std::move(s));
    }
    if (stations.empty()) throw DataError(stations_csv.string() + ": no stations");
    return stations;
}

MaximaPanel load_panel(const std::filesystem::path& panel_csv,
                       const std::filesystem::path& stations_csv) {
    MaximaPanel panel;
    panel.stations = load_stations(stations_csv);

    std::map<std::string, std::size_t> station_of;
    for (std::size_t i = 0; i < panel.stations.size(); ++i)
        station_of[panel.stations[i].id] = i;

    struct Cell {
        int year;
        std::size_t station;
        double value;
        int line;
    };
    std::vector<Cell> cells;
    std::map<int, std::size_t> year_of;
    {
        CsvReader r(panel_csv);
        std::string line;
        if (!r.next(line)) throw DataError(r.name + ": empty panel file");
        expect_header(split_csv(line), {"year", "station_id", "value"}, r.where());
        while (r.next(line)) {
            const auto c = split_csv(line);
            if (c.size() != 3)
                throw DataError(r.where() + ": expected 3 cells, got " + std::to_string(c.size()));
            Cell cell;
            cell.year = parse_int(c[0], r.where());
            const auto it = station_of.find(c[1]);
            if (it == station_of.end())
                throw DataError(r.where() + ": unknown station id '" + c[1] + "'");
            cell.station = it->second;
            cell.value = c[2].empty() ? kNan : parse_double(c[2], r.where());
            cell.line = r.line_no;
            year_of.emplace(cell.year, 0);
            cells.push_back(cell);
        }
        panel.scale_tag = r.scale_frechet ? MaximaPanel::Scale::Frechet : MaximaPanel::Scale::Raw;
    }
    if (cells.empty()) throw DataError(panel_csv.string() + ": no observations");

    std::size_t k = 0;
    for (auto& [year, index] : year_of) index = k++;
    panel.years.resize(year_of.size());
    for (const auto& [year, index] : year_of) panel.years[index] = year;

    panel.values.assign(panel.n_years() * panel.n_stations(), kNan);
    std::vector<int> filled(panel.values.size(), 0);
    for (const auto& cell : cells) {
        const std::size_t pos = year_of[cell.year] * panel.n_stations() + cell.station;
        if (filled[pos])
            throw DataError(panel_csv.string() + ":" + std::to_string(cell.line) +
                            ": duplicate (year, station) entry");
        filled[pos] = 1;
        panel.values[pos] = cell.value;
    }
    panel.validate();
    return panel;
}

void save_panel(const MaximaPanel& panel, const std::filesystem::path& panel_csv,
                const std::filesystem::path& stations_csv, const Provenance& prov) {
    for (const auto& s : panel.stations)
        if (s.id.find(',') != std::string::npos || s.id.find('#') != std::string::npos)
            throw DataError("save_panel: station id '" + s.id + "' not CSV-safe");
    {
        std::ofstream out(stations_csv);
        if (!out) throw DataError("cannot write '" + stations_csv.string() + "'");
        out << provenance_comment(prov) << "\n";
        out << "station_id,lon_km,lat_km,elev_km,region_signed_dist_km,mean_level\n";
        for (const auto& s : panel.stations) {
            out << s.id << ',' << format_double(s.coords.lon) << ',' << format_double(s.coords.lat)
                << ',' << format_double(s.coords.elev) << ','
                << format_double(s.coords.region_signed_dist) << ',';
            if (s.coords.mean_level) out << format_double(*s.coords.mean_level);
            out << '\n';
        }
    }
    {
        std::ofstream out(panel_csv);
        if (!out) throw DataError("cannot write '" + panel_csv.string() + "'");
        out << provenance_comment(prov) << "\n";
        if (panel.scale_tag == MaximaPanel::Scale::Frechet) out << "# scale=frechet\n";
        out << "year,station_id,value\n";
        for (std::size_t k = 0; k < panel.n_years(); ++k) {
            for (std::size_t i = 0; i < panel.n_stations(); ++i) {
                if (!panel.present(k, i)) continue;
                out << panel.years[k] << ',' << panel.stations[i].id << ','
                    << format_double(panel.at(k, i)) << '\n';
            }
        }
    }
}

json model_spec_to_json(const ModelSpec& spec) {
    json j;
    j["name"] = spec.name;
    j["family"] = to_string(spec.family);
    if (spec.family == ModelFamily::Schlather) {
        j["correlation"] = {{"family", to_string(spec.corr.family)},
                            {"shape", spec.corr.shape},
                            {"shape_free", spec.corr_shape_free}};
    }
    json coords = json::array();
    if (spec.transform.use_elevation) coords.push_back("elev");
    if (spec.transform.use_region) coords.push_back("region");
    if (spec.transform.use_mean_level) coords.push_back("mean_level");
    j["coords"] = coords;
    j["rotation"] = spec.transform.fit_rotation;
    j["per_region"] = spec.transform.per_region;
    j["bandwidths"] = spec.transform.bandwidth_grid;
    json params = json::object();
    for (const auto& p : spec.params)
        params[p.name] = {{"min", p.lo}, {"max", p.hi}, {"init", p.init}};
    j["params"] = params;
    j["j_mode"] = spec.j_mode == JAccumulation::ByYear ? "year" : "pair_year";
    j["grid_points"] = spec.grid_points;
    j["max_sweeps"] = spec.max_sweeps;
    j["sweep_tol"] = spec.sweep_tol;
    return j;
}

ModelSpec model_spec_from_json(const json& j) {
    ModelSpec spec;
    try {
        spec.name = j.at("name").get<std::string>();
        spec.family = model_family_from_string(j.at("family").get<std::string>());
        if (spec.family == ModelFamily::Schlather) {
            if (!j.contains("correlation"))
                throw ConfigError("spec '" + spec.name + "': Schlather needs a correlation block");
            const json& c = j.at("correlation");
            spec.corr = make_correlation_spec(
                corr_family_from_string(c.at("family").get<std::string>()));
            if (c.contains("shape")) spec.corr.shape = c.at("shape").get<double>();
            spec.corr_shape_free = c.value("shape_free", false);
        } else if (j.contains("correlation")) {
            throw ConfigError("spec '" + spec.name + "': Smith takes no correlation block");
        }
        if (j.contains("coords")) {
            for (const auto& c : j.at("coords")) {
                const std::string name = c.get<std::string>();
                if (name == "elev") {
                    spec.transform.use_elevation = true;
                } else if (name == "region") {
                    spec.transform.use_region = true;
                } else if (name == "mean_level") {
                    spec.transform.use_mean_level = true;
                } else {
                    throw ConfigError("spec '" + spec.name + "': unknown coordinate '" + name +
                                      "' (expected elev, region or mean_level)");
                }
            }
        }
        spec.transform.fit_rotation = j.value("rotation", true);
        spec.transform.per_region = j.value("per_region", false);
        if (j.contains("bandwidths"))
            spec.transform.bandwidth_grid = j.at("bandwidths").get<std::vector<double>>();
        if (j.contains("params")) {
            for (const auto& [name, pj] : j.at("params").items()) {
                ParamDef def;
                def.name = name;
                def.lo = pj.at("min").get<double>();
                def.hi = pj.at("max").get<double>();
                def.init = pj.at("init").get<double>();
                spec.params.push_back(def);
            }
        }
        const std::string jm = j.value("j_mode", std::string("year"));
        if (jm == "year") {
            spec.j_mode = JAccumulation::ByYear;
        } else if (jm == "pair_year") {
            spec.j_mode = JAccumulation::ByPairYear;
        } else {
            throw ConfigError("spec '" + spec.name + "': unknown j_mode '" + jm + "'");
        }
        spec.grid_points = j.value("grid_points", 32);
        spec.max_sweeps = j.value("max_sweeps", 100);
        spec.sweep_tol = j.value("sweep_tol", 1e-6);
        if (spec.grid_points < 2)
            throw ConfigError("spec '" + spec.name + "': grid_points must be >= 2");
        if (spec.max_sweeps < 1)
            throw ConfigError("spec '" + spec.name + "': max_sweeps must be >= 1");
    } catch (const json::exception& e) {
        throw ConfigError("model spec: " + std::string(e.what()));
    }
    spec.finalize();
    return spec;
}

json fit_result_to_json(const FitResult& fit, const ModelSpec& spec, const Provenance& prov) {
    json j;
    j["provenance"] = provenance_json(prov);
    j["spec"] = model_spec_to_json(spec);
    j["converged"] = fit.converged;
    j["n_sweeps"] = fit.n_sweeps;
    j["band_width"] = fit.band_width;
    j["pll"] = fit.pll;
    j["clic"] = fit.clic;
    j["clic_rescaled"] = fit.clic_rescaled;
    j["note"] = fit.note;
    json params = json::array();
    for (Eigen::Index i = 0; i < fit.beta_hat.size(); ++i) {
        params.push_back({{"name", fit.param_names[static_cast<std::size_t>(i)]},
                          {"estimate", fit.beta_hat[i]},
                          {"se", fit.se.size() > i ? fit.se[i] : kNan}});
    }
    j["params"] = params;
    auto matrix_json = [](const Eigen::MatrixXd& m) {
        json rows = json::array();
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            json row = json::array();
            for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
            rows.push_back(row);
        }
        return rows;
    };
    j["H"] = matrix_json(fit.H);
    j["J"] = matrix_json(fit.J);
    j["sandwich_cov"] = matrix_json(fit.sandwich_cov);
    json trace = json::array();
    for (const auto& t : fit.trace)
        trace.push_back({{"sweep", t.sweep},
                         {"band_width", t.band_width},
                         {"pll", t.pll},
                         {"beta", t.beta}});
    j["trace"] = trace;
    return j;
}

FittedModel fitted_model_from_json(const json& j) {
    FittedModel m;
    try {
        m.spec = model_spec_from_json(j.at("spec"));
        m.band_width = j.at("band_width").get<double>();
        const json& params = j.at("params");
        if (params.size() != m.spec.n_params())
            throw ConfigError("fit result: parameter count mismatch with spec");
        m.beta.resize(static_cast<Eigen::Index>(params.size()));
        for (std::size_t i = 0; i < params.size(); ++i) {
            const std::string name = params[i].at("name").get<std::string>();
            if (name != m.spec.params[i].name)
                throw ConfigError("fit result: parameter '" + name + "' out of order, expected '" +
                                  m.spec.params[i].name + "'");
            m.beta[static_cast<Eigen::Index>(i)] = params[i].at("estimate").get<double>();
        }
    } catch (const json::exception& e) {
        throw ConfigError("fit result: " + std::string(e.what()));
    }
    return m;
}

std::vector<StationRecord> synth_layout(const LayoutSpec& layout, std::uint64_t seed) {
    if (layout.n_stations < 2)
        throw ConfigError("synth layout: need at least 2 stations");
    Rng rng = Rng::substream(seed, 0x4C41594F55ULL);  // layout stream
    std::vector<StationRecord> stations;
    stations.reserve(static_cast<std::size_t>(layout.n_stations));
    int width = 1;
    for (int n = layout.n_stations; n >= 10; n /= 10) ++width;
    for (int i = 0; i < layout.n_stations; ++i) {
        StationRecord s;
        std::string num = std::to_string(i + 1);
        s.id = "S" + std::string(static_cast<std::size_t>(width) - num.size(), '0') + num;
        s.coords.lon = rng.uniform(layout.lon_min, layout.lon_max);
        s.coords.lat = rng.uniform(layout.lat_min, layout.lat_max);
        s.coords.elev = rng.uniform(layout.elev_min, layout.elev_max);
        s.coords.region_signed_dist =
            layout.two_regions ? s.coords.lat - layout.border_lat : 1.0;
        s.coords.mean_level = layout.mean_level_base +
                              layout.mean_level_elev_slope * s.coords.elev +
                              layout.mean_level_noise * rng.normal();
        stations.push_back(std::move(s));
    }
    return stations;
}

SynthResult synth_dataset(const FittedModel& truth, const LayoutSpec& layout, int n_years,
                          int first_year, std::uint64_t seed, MarginMode margins) {
    if (n_years < 1) throw ConfigError("synth: need at least 1 year");
    SynthResult out;
    out.panel.stations = synth_layout(layout, seed);
    out.panel.years.resize(static_cast<std::size_t>(n_years));
    for (int k = 0; k < n_years; ++k)
        out.panel.years[static_cast<std::size_t>(k)] = first_year + k;

    SimConfig cfg;
    cfg.seed = seed;
    cfg.n_replicates = n_years;
    const std::vector<SimField> fields = simulate_fitted(truth, out.panel.stations, cfg);

    const std::size_t d = out.panel.n_stations();
    out.panel.values.resize(d * static_cast<std::size_t>(n_years));
    for (int k = 0; k < n_years; ++k)
        for (std::size_t i = 0; i < d; ++i)
            out.panel.at(static_cast<std::size_t>(k), i) =
                fields[static_cast<std::size_t>(k)].values[i];
    out.panel.scale_tag = MaximaPanel::Scale::Frechet;

    json truth_margins = json::array();
    if (margins == MarginMode::Gev) {
        Rng rng = Rng::substream(seed, 0x474556ULL);  // margin stream
        out.margins.reserve(d);
        for (std::size_t i = 0; i < d; ++i) {
            GevParams p;
            p.mu = rng.uniform(20.0, 120.0);
            p.sigma = rng.uniform(5.0, 30.0);
            p.xi = rng.uniform(-0.15, 0.3);
            out.margins.push_back(p);
            truth_margins.push_back({{"station_id", out.panel.stations[i].id},
                                     {"mu", p.mu},
                                     {"sigma", p.sigma},
                                     {"xi", p.xi}});
            for (int k = 0; k < n_years; ++k) {
                double& v = out.panel.at(static_cast<std::size_t>(k), i);
                v = from_unit_frechet(v, p);
            }
        }
        out.panel.scale_tag = MaximaPanel::Scale::Raw;
    }

    out.truth["spec"] = model_spec_to_json(truth.spec);
    out.truth["band_width"] = truth.band_width;
    json beta = json::object();
    for (std::size_t i = 0; i < truth.spec.n_params(); ++i)
        beta[truth.spec.params[i].name] = truth.beta[static_cast<Eigen::Index>(i)];
    out.truth["beta"] = beta;
    out.truth["seed"] = seed;
    out.truth["n_years"] = n_years;
    out.truth["margins"] = truth_margins;
    out.panel.validate();
    return out;
}

}  // namespace maxstab
