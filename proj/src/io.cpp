#include "heston/io.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

namespace heston {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

[[noreturn]] void parse_fail(const fs::path& path, std::size_t line, const std::string& what) {
    std::ostringstream os;
    os << path.string() << ":" << line << ": " << what;
    throw Error(ErrorCategory::Parse, os.str());
}

std::ifstream open_input(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCategory::Io, "cannot open " + path.string());
    return in;
}

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCategory::Io, "cannot write " + path.string());
    return out;
}

void finish(std::ofstream& out, const fs::path& path) {
    out.flush();
    if (!out) throw Error(ErrorCategory::Io, "write failed for " + path.string());
}

// A CSV file as (line number, fields) records after the header.
struct CsvRecords {
    std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
};

CsvRecords read_csv(const fs::path& path, const std::vector<std::string_view>& header) {
    auto in = open_input(path);
    std::string line;
    std::size_t number = 0;
    bool have_header = false;
    CsvRecords out;
    while (std::getline(in, line)) {
        ++number;
        const auto text = trim(line);
        if (text.empty()) continue;
        const auto fields = split(text, ',');
        if (!have_header) {
            if (fields != header) {
                std::string expected;
                for (auto h : header) expected += (expected.empty() ? "" : ",") + std::string(h);
                parse_fail(path, number, "expected header '" + expected + "'");
            }
            have_header = true;
            continue;
        }
        if (fields.size() != header.size()) {
            std::ostringstream os;
            os << "expected " << header.size() << " fields, got " << fields.size();
            parse_fail(path, number, os.str());
        }
        std::vector<std::string> owned(fields.begin(), fields.end());
        out.rows.emplace_back(number, std::move(owned));
    }
    if (!have_header) parse_fail(path, number, "file is empty");
    return out;
}

double field_double(const fs::path& path, std::size_t line, std::string_view text, std::string_view name) {
    try {
        return parse_double(text);
    } catch (const Error&) {
        parse_fail(path, line, "column '" + std::string(name) + "' is not a number: '" + std::string(text) + "'");
    }
}

std::chrono::sys_days parse_date(std::string_view text) {
    using namespace std::chrono;
    int y = 0;
    unsigned mo = 0, d = 0;
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') throw std::invalid_argument("bad date");
    auto num = [&](std::size_t at, std::size_t len, auto& out) {
        const auto* first = text.data() + at;
        const auto res = std::from_chars(first, first + len, out);
        if (res.ec != std::errc() || res.ptr != first + len) throw std::invalid_argument("bad date");
    };
    num(0, 4, y);
    num(5, 2, mo);
    num(8, 2, d);
    const year_month_day ymd{year{y}, month{mo}, day{d}};
    if (!ymd.ok()) throw std::invalid_argument("bad date");
    return sys_days{ymd};
}

std::chrono::sys_days field_date(const fs::path& path, std::size_t line, std::string_view text) {
    try {
        return parse_date(text);
    } catch (const std::invalid_argument&) {
        parse_fail(path, line, "invalid ISO date '" + std::string(text) + "'");
    }
}

std::string format_date(std::chrono::sys_days day) {
    using namespace std::chrono;
    const year_month_day ymd{day};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()));
    return buf;
}

long parse_integer(std::string_view text) {
    long v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw Error(ErrorCategory::Parse, "not an integer: '" + std::string(text) + "'");
    }
    return v;
}

std::size_t parse_count(std::string_view text) {
    const long v = parse_integer(text);
    if (v < 0) throw Error(ErrorCategory::Parse, "expected a non-negative integer: '" + std::string(text) + "'");
    return static_cast<std::size_t>(v);
}

}  // namespace

// ---------------------------------------------------------------------------------------------

Grid GridSpec::grid_for(double tau) const {
    Grid g{x_min, x_max, y_max, tau, m, n, s};
    g.validate();
    return g;
}

void RunConfig::set(std::string_view key, std::string_view value) {
    key = trim(key);
    value = trim(value);
    auto number = [&] { return parse_double(value); };
    if (key == "dataset") dataset = std::string(value);
    else if (key == "pool") pool = std::string(value);
    else if (key == "T") T = number();
    else if (key == "grid") {
        const auto parts = split(value, ',');
        if (parts.size() != 3) throw Error(ErrorCategory::Parse, "grid expects m,n,s");
        grid.m = static_cast<int>(parse_integer(parts[0]));
        grid.n = static_cast<int>(parse_integer(parts[1]));
        grid.s = static_cast<int>(parse_integer(parts[2]));
    } else if (key == "x_min") grid.x_min = number();
    else if (key == "x_max") grid.x_max = number();
    else if (key == "y_max") grid.y_max = number();
    else if (key == "m") grid.m = static_cast<int>(parse_integer(value));
    else if (key == "n") grid.n = static_cast<int>(parse_integer(value));
    else if (key == "s") grid.s = static_cast<int>(parse_integer(value));
    else if (key == "options") {
        options.clear();
        for (auto item : split(value, ',')) {
            const auto kv = split(item, ':');
            if (kv.size() != 2) throw Error(ErrorCategory::Parse, "options expects strike:maturity pairs");
            options.push_back({parse_double(kv[0]), parse_double(kv[1])});
        }
    } else if (key == "r") r = number();
    else if (key == "lambda") lambda_risk = number();
    else if (key == "kappa") params.kappa = number();
    else if (key == "theta") params.theta = number();
    else if (key == "gamma") params.gamma = number();
    else if (key == "rho") params.rho = number();
    else if (key == "mu") params.mu = number();
    else if (key == "L_grid") {
        const auto parts = split(value, ':');
        if (parts.size() != 3) throw Error(ErrorCategory::Parse, "L_grid expects start:step:end");
        L_start = parse_double(parts[0]);
        L_step = parse_double(parts[1]);
        L_end = parse_double(parts[2]);
    } else if (key == "subset_size") subset_size = parse_count(value);
    else if (key == "steps_per_day") steps_per_day = static_cast<int>(parse_integer(value));
    else if (key == "paths") paths = parse_count(value);
    else if (key == "observations") observations = parse_count(value);
    else if (key == "delta") delta = number();
    else if (key == "x0") x0 = number();
    else if (key == "y0") y0 = number();
    else if (key == "start_date") {
        try {
            parse_date(value);
        } catch (const std::invalid_argument&) {
            throw Error(ErrorCategory::Parse, "invalid ISO date '" + std::string(value) + "'");
        }
        start_date = std::string(value);
    } else if (key == "seed") seed = static_cast<std::uint64_t>(parse_count(value));
    else if (key == "box_density") box_density = static_cast<int>(parse_integer(value));
    else if (key == "s_lambda") s_lambda = number();
    else if (key == "threads") threads = static_cast<unsigned>(parse_count(value));
    else throw Error(ErrorCategory::Parse, "unknown config key '" + std::string(key) + "'");
}

void RunConfig::validate() const {
    if (!(T > 0.0)) throw Error(ErrorCategory::InvalidArgument, "T must be > 0");
    grid.grid_for(1.0);
    if (options.empty()) throw Error(ErrorCategory::InvalidArgument, "config lists no options");
    for (const auto& o : options) o.validate();
    MarketEnv{r, lambda_risk}.validate();
    if (!(delta > 0.0) || delta > T) throw Error(ErrorCategory::InvalidArgument, "delta must be in (0, T]");
    if (steps_per_day < 1) throw Error(ErrorCategory::InvalidArgument, "steps_per_day must be >= 1");
    if (box_density < 1) throw Error(ErrorCategory::InvalidArgument, "box_density must be >= 1");
    if (!(s_lambda >= 0.0)) throw Error(ErrorCategory::InvalidArgument, "s_lambda must be >= 0");
    if (!(x0 > 0.0)) throw Error(ErrorCategory::InvalidArgument, "x0 must be > 0");
    if (!dataset.empty() && !fs::exists(dataset)) {
        throw Error(ErrorCategory::Io, "dataset not found: " + dataset.string());
    }
    if (!pool.empty() && !fs::exists(pool)) throw Error(ErrorCategory::Io, "pool manifest not found: " + pool.string());
    L_grid();
}

std::vector<double> RunConfig::L_grid() const { return arithmetic_grid(L_start, L_step, L_end); }

CalibrationGrid RunConfig::calibration_grid() const {
    return {grid.x_min, grid.x_max, grid.y_max, grid.m, grid.n, steps_per_day, T};
}

RunConfig load_config(const fs::path& path) {
    auto in = open_input(path);
    RunConfig config;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        auto text = std::string_view(line);
        if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
        text = trim(text);
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string_view::npos) parse_fail(path, number, "expected key = value");
        try {
            config.set(text.substr(0, eq), text.substr(eq + 1));
        } catch (const Error& e) {
            parse_fail(path, number, e.what());
        }
    }
    const auto base = path.parent_path();
    if (!config.dataset.empty() && config.dataset.is_relative()) config.dataset = base / config.dataset;
    if (!config.pool.empty() && config.pool.is_relative()) config.pool = base / config.pool;
    return config;
}

void apply_override(RunConfig& config, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) {
        throw Error(ErrorCategory::Parse, "override must be key=value: '" + std::string(assignment) + "'");
    }
    config.set(assignment.substr(0, eq), assignment.substr(eq + 1));
}

// ---------------------------------------------------------------------------------------------

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
    text = trim(text);
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw Error(ErrorCategory::Parse, "not a number: '" + std::string(text) + "'");
    }
    return v;
}

ObservationSeries load_observations(const fs::path& path, double T) {
    const auto csv = read_csv(path, {"date", "price", "vix"});
    ObservationSeries series;
    series.step = T;
    std::chrono::sys_days last{};
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
        const auto& [line, f] = csv.rows[r];
        const auto day = field_date(path, line, f[0]);
        if (r > 0 && !(day > last)) parse_fail(path, line, "dates must be strictly increasing");
        last = day;
        const double price = field_double(path, line, f[1], "price");
        const double vix = field_double(path, line, f[2], "vix");
        if (!(price > 0.0) || !std::isfinite(price)) parse_fail(path, line, "price must be > 0");
        if (!(vix > 0.0) || !std::isfinite(vix)) parse_fail(path, line, "vix must be > 0");
        series.prices.push_back(price);
        series.squared_vols.push_back(vix_to_squared_vol(vix));
    }
    if (series.prices.size() < 2) {
        throw Error(ErrorCategory::Parse, path.string() + ": need at least two observation rows");
    }
    series.validate();
    return series;
}

std::vector<std::string> weekday_dates(const std::string& start, std::size_t count) {
    using namespace std::chrono;
    sys_days day;
    try {
        day = parse_date(start);
    } catch (const std::invalid_argument&) {
        throw Error(ErrorCategory::InvalidArgument, "invalid start date '" + start + "'");
    }
    std::vector<std::string> out;
    out.reserve(count);
    while (out.size() < count) {
        const weekday wd{day};
        if (wd != Saturday && wd != Sunday) out.push_back(format_date(day));
        day += days{1};
    }
    return out;
}

void write_observations(const fs::path& path, const ObservationSeries& series, const std::string& start_date) {
    series.validate();
    const auto dates = weekday_dates(start_date, series.prices.size());
    auto out = open_output(path);
    out << "date,price,vix\n";
    for (std::size_t n = 0; n < series.prices.size(); ++n) {
        out << dates[n] << ',' << format_double(series.prices[n]) << ','
            << format_double(100.0 * std::sqrt(series.squared_vols[n])) << '\n';
    }
    finish(out, path);
}

void export_surfaces(const std::vector<std::string>& names, const std::vector<const Surface*>& surfaces,
                     const fs::path& path) {
    if (names.empty() || names.size() != surfaces.size()) {
        throw Error(ErrorCategory::InvalidArgument, "export needs one name per surface");
    }
    const Grid& g = surfaces.front()->grid();
    for (const auto* s : surfaces) {
        if (!s->grid().same_as(g) || s->values().size() != g.nodes_per_slice() * (g.s + 1)) {
            throw Error(ErrorCategory::InvalidArgument, "exported surfaces must share one complete grid");
        }
    }
    auto out = open_output(path);
    out << "x,y,t_to_maturity";
    for (const auto& n : names) out << ',' << n;
    out << '\n';
    for (int k = 0; k <= g.s; ++k) {
        const std::string t = format_double(g.t(k));
        for (int j = 0; j <= g.n; ++j) {
            const std::string y = format_double(g.y(j));
            for (int i = 0; i <= g.m; ++i) {
                out << format_double(g.x(i)) << ',' << y << ',' << t;
                for (const auto* s : surfaces) out << ',' << format_double(s->at(i, j, k));
                out << '\n';
            }
        }
    }
    finish(out, path);
}

void export_surface(const Surface& surface, const fs::path& path) { export_surfaces({"value"}, {&surface}, path); }

Surface import_surface(const fs::path& path, const Grid& grid) {
    const auto csv = read_csv(path, {"x", "y", "t_to_maturity", "value"});
    if (csv.rows.size() != grid.nodes_per_slice() * (grid.s + 1)) {
        throw Error(ErrorCategory::Parse, path.string() + ": row count does not match the grid");
    }
    Surface out(grid);
    std::size_t r = 0;
    for (int k = 0; k <= grid.s; ++k)
        for (int j = 0; j <= grid.n; ++j)
            for (int i = 0; i <= grid.m; ++i, ++r) {
                const auto& [line, f] = csv.rows[r];
                const double x = field_double(path, line, f[0], "x");
                const double y = field_double(path, line, f[1], "y");
                const double t = field_double(path, line, f[2], "t_to_maturity");
                if (x != grid.x(i) || y != grid.y(j) || t != grid.t(k)) {
                    parse_fail(path, line, "coordinates do not match the grid");
                }
                out.at(i, j, k) = field_double(path, line, f[3], "value");
            }
    return out;
}

std::vector<BenchmarkOption> load_pool(const fs::path& manifest, double T) {
    const auto listing = read_csv(manifest, {"file", "strike", "maturity_date"});
    if (listing.rows.empty()) throw Error(ErrorCategory::Parse, manifest.string() + ": manifest lists no options");
    std::vector<BenchmarkOption> pool;
    for (const auto& [mline, mf] : listing.rows) {
        fs::path file = mf[0];
        if (file.is_relative()) file = manifest.parent_path() / file;
        const double strike = field_double(manifest, mline, mf[1], "strike");
        if (!(strike > 0.0)) parse_fail(manifest, mline, "strike must be > 0");
        const auto maturity_day = field_date(manifest, mline, mf[2]);

        const auto csv = read_csv(file, {"date", "mid", "spot", "vix"});
        if (csv.rows.empty()) throw Error(ErrorCategory::Parse, file.string() + ": no quotes");
        std::vector<double> quotes, spots, vols;
        std::chrono::sys_days last{};
        for (std::size_t r = 0; r < csv.rows.size(); ++r) {
            const auto& [line, f] = csv.rows[r];
            const auto day = field_date(file, line, f[0]);
            if (r > 0 && !(day > last)) parse_fail(file, line, "dates must be strictly increasing");
            last = day;
            const double mid = field_double(file, line, f[1], "mid");
            const double spot = field_double(file, line, f[2], "spot");
            const double vix = field_double(file, line, f[3], "vix");
            if (!(mid >= 0.0)) parse_fail(file, line, "mid must be >= 0");
            if (!(spot > 0.0)) parse_fail(file, line, "spot must be > 0");
            if (!(vix > 0.0)) parse_fail(file, line, "vix must be > 0");
            quotes.push_back(mid);
            spots.push_back(spot);
            vols.push_back(vix_to_squared_vol(vix));
        }
        if (last != maturity_day) {
            parse_fail(manifest, mline, "last quote date differs from the maturity date");
        }
        const CallOption option{strike, static_cast<double>(quotes.size()) * T};
        auto b = make_benchmark(option, std::move(quotes), std::move(spots), std::move(vols));
        if (!(b.median_price > 0.0)) parse_fail(manifest, mline, "median quote must be > 0");
        pool.push_back(std::move(b));
    }
    return pool;
}

void write_pool_option(const fs::path& path, const BenchmarkOption& option, const std::string& start_date) {
    const auto dates = weekday_dates(start_date, option.days());
    auto out = open_output(path);
    out << "date,mid,spot,vix\n";
    for (std::size_t d = 0; d < option.days(); ++d) {
        out << dates[d] << ',' << format_double(option.quotes[d]) << ',' << format_double(option.spots[d]) << ','
            << format_double(100.0 * std::sqrt(option.squared_vols[d])) << '\n';
    }
    finish(out, path);
}

void write_table(const fs::path& path, const std::vector<std::string>& header,
                 const std::vector<std::vector<double>>& rows) {
    auto out = open_output(path);
    for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
    out << '\n';
    for (const auto& row : rows) {
        if (row.size() != header.size()) throw Error(ErrorCategory::InvalidArgument, "table row width mismatch");
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_double(row[c]);
        out << '\n';
    }
    finish(out, path);
}

}  // namespace heston
