#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "heston/estimation.hpp"
#include "heston/lambda_calibration.hpp"
#include "heston/pde.hpp"

namespace heston {

struct GridSpec {
    double x_min = 100.0;
    double x_max = 2800.0;
    double y_max = 1.0;
    int m = 90;
    int n = 80;
    int s = 63;

    Grid grid_for(double tau) const;
};

/// Every setting a CLI run reads. Parsed from a flat `key = value` file; `#` starts a comment.
struct RunConfig {
    std::filesystem::path dataset;      // date,price,vix
    std::filesystem::path pool;         // benchmark manifest
    double T = kTradingDay;
    GridSpec grid;
    std::vector<CallOption> options{{1380.0, 0.25}};
    double r = 0.01;
    double lambda_risk = 0.0;
    HestonParams params{16.6, 0.017, 0.28, -0.54, 0.0};

    // Candidate lambda grid start:step:end.
    double L_start = 0.0;
    double L_step = 0.25;
    double L_end = 4.0;
    std::size_t subset_size = 0;  // 0 skips the subset bootstrap
    int steps_per_day = 1;

    // Bootstrap and simulation.
    std::size_t paths = 5000;
    std::size_t observations = 252;
    double delta = kTradingDay / 20.0;
    double x0 = 1426.0;
    double y0 = 0.0;  // <= 0 means theta
    std::string start_date = "2006-01-03";
    std::uint64_t seed = 1;

    int box_density = 1;
    double s_lambda = 0.0;
    unsigned threads = 1;

    void set(std::string_view key, std::string_view value);
    void validate() const;
    std::vector<double> L_grid() const;
    CalibrationGrid calibration_grid() const;
};

/// Reads a config file; unknown keys and malformed values are Parse errors with line numbers.
RunConfig load_config(const std::filesystem::path& path);
void apply_override(RunConfig& config, std::string_view assignment);

/// CSV `date,price,vix` with ISO dates in increasing order, vix in percentage points.
ObservationSeries load_observations(const std::filesystem::path& path, double T);
void write_observations(const std::filesystem::path& path, const ObservationSeries& series,
                        const std::string& start_date);

/// Shortest decimal form that reads back to the same double (17 significant digits at most).
std::string format_double(double v);
double parse_double(std::string_view text);

/// CSV `x,y,t_to_maturity,value`, one row per node in (k, j, i) order.
void export_surface(const Surface& surface, const std::filesystem::path& path);
/// Same layout with one value column per surface; all surfaces share the first one's grid.
void export_surfaces(const std::vector<std::string>& names, const std::vector<const Surface*>& surfaces,
                     const std::filesystem::path& path);
/// Reads an exported surface back on the given grid, checking every coordinate.
Surface import_surface(const std::filesystem::path& path, const Grid& grid);

/// Manifest `file,strike,maturity_date`; each option file has `date,mid,spot,vix` rows for days
/// 1..D, the last one on the maturity date. Maturity is D * T. Relative file names resolve
/// against the manifest's directory.
std::vector<BenchmarkOption> load_pool(const std::filesystem::path& manifest, double T);
void write_pool_option(const std::filesystem::path& path, const BenchmarkOption& option,
                       const std::string& start_date);

/// Plain numeric table with a header row.
void write_table(const std::filesystem::path& path, const std::vector<std::string>& header,
                 const std::vector<std::vector<double>>& rows);

/// Weekday calendar helpers for synthetic data.
std::vector<std::string> weekday_dates(const std::string& start, std::size_t count);

}  // namespace heston
