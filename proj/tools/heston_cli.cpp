// Command-line driver: one subcommand per pipeline stage, all reading the same flat config.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "heston/estimation.hpp"
#include "heston/impact.hpp"
#include "heston/io.hpp"
#include "heston/lambda_calibration.hpp"
#include "heston/simulate.hpp"

namespace fs = std::filesystem;
using namespace heston;

namespace {

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string grid;
    std::optional<unsigned> threads;
    std::string out = "out";
    std::vector<std::string> sets;
};

RunConfig resolve_config(const Flags& flags) {
    RunConfig config = flags.config.empty() ? RunConfig{} : load_config(flags.config);
    for (const auto& s : flags.sets) apply_override(config, s);
    if (!flags.grid.empty()) config.set("grid", flags.grid);
    if (flags.seed) config.seed = *flags.seed;
    if (flags.threads) config.threads = *flags.threads;
    config.validate();
    return config;
}

// Parameters come from the dataset estimate when one is configured, else from the config.
HestonParams resolve_params(const RunConfig& config) {
    if (config.dataset.empty()) return config.params;
    const auto est = estimate_all(load_observations(config.dataset, config.T));
    if (!est.feasible) {
        throw Error(ErrorCategory::InfeasibleParams, "dataset estimate is infeasible: " + est.report.summary());
    }
    return est.params;
}

double start_vol(const RunConfig& config, const HestonParams& p) { return config.y0 > 0.0 ? config.y0 : p.theta; }

void write_key_values(const fs::path& path, const std::vector<std::pair<std::string, double>>& rows) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCategory::Io, "cannot write " + path.string());
    out << "name,value\n";
    for (const auto& [k, v] : rows) out << k << ',' << format_double(v) << '\n';
    if (!out) throw Error(ErrorCategory::Io, "write failed for " + path.string());
}

fs::path output_file(const Flags& flags, const std::string& name) {
    fs::create_directories(flags.out);
    return fs::path(flags.out) / name;
}

std::string option_tag(std::size_t index) { return std::to_string(index); }

ErrorModel run_bootstrap(const RunConfig& config, const HestonParams& center) {
    BootstrapConfig bc;
    bc.observations = config.observations;
    bc.T = config.T;
    bc.delta = config.delta;
    bc.paths = config.paths;
    bc.seed = config.seed;
    bc.x0 = config.x0;
    bc.y0 = config.y0;
    bc.threads = config.threads;
    return bootstrap_covariance(center, bc);
}

void write_error_model(const fs::path& path, const ErrorModel& em) {
    static const char* names[] = {"kappa", "theta", "gamma", "rho"};
    const auto center = theta_vector(em.center);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCategory::Io, "cannot write " + path.string());
    out << "parameter,estimate,sd,box_lo,box_hi,cov_kappa,cov_theta,cov_gamma,cov_rho\n";
    for (int p = 0; p < 4; ++p) {
        out << names[p] << ',' << format_double(center[p]) << ',' << format_double(em.sds[p]) << ','
            << format_double(em.box[p].lo) << ',' << format_double(em.box[p].hi);
        for (int q = 0; q < 4; ++q) out << ',' << format_double(em.sigma(p, q));
        out << '\n';
    }
    if (!out) throw Error(ErrorCategory::Io, "write failed for " + path.string());
}

// ---------------------------------------------------------------------------------------------

void cmd_simulate(const Flags& flags) {
    const auto config = resolve_config(flags);
    const auto& p = config.params;
    require_feasible(p);
    const double horizon = static_cast<double>(config.observations) * config.T;
    const auto path = simulate_path(p, config.x0, start_vol(config, p), horizon, config.delta, config.seed);
    const auto series = subsample(path, config.T);
    const auto file = output_file(flags, "observations.csv");
    write_observations(file, series, config.start_date);
    std::cout << "wrote " << series.prices.size() << " observations to " << file.string() << '\n';
}

void cmd_estimate(const Flags& flags) {
    const auto config = resolve_config(flags);
    if (config.dataset.empty()) throw Error(ErrorCategory::InvalidArgument, "estimate needs a dataset");
    const auto est = estimate_all(load_observations(config.dataset, config.T));
    const auto& p = est.params;
    write_key_values(output_file(flags, "estimate.csv"), {{"kappa", p.kappa},
                                                          {"theta", p.theta},
                                                          {"gamma", p.gamma},
                                                          {"gamma_sq", est.gamma_sq},
                                                          {"rho", p.rho},
                                                          {"mu", p.mu},
                                                          {"feasible", est.feasible ? 1.0 : 0.0}});
    std::cout << "kappa=" << format_double(p.kappa) << " theta=" << format_double(p.theta)
              << " gamma=" << format_double(p.gamma) << " rho=" << format_double(p.rho)
              << " mu=" << format_double(p.mu) << '\n';
    if (!est.feasible) std::cout << "infeasible: " << est.report.summary() << '\n';
}

void cmd_covariance(const Flags& flags) {
    const auto config = resolve_config(flags);
    const auto center = resolve_params(config);
    const auto em = run_bootstrap(config, center);
    write_error_model(output_file(flags, "covariance.csv"), em);
    std::cout << "accepted " << em.accepted << " of " << config.paths << " paths; sds";
    for (double s : em.sds) std::cout << ' ' << format_double(s);
    std::cout << '\n';
}

void cmd_price(const Flags& flags) {
    const auto config = resolve_config(flags);
    const auto p = resolve_params(config);
    const MarketEnv env{config.r, config.lambda_risk};
    for (std::size_t o = 0; o < config.options.size(); ++o) {
        const auto& option = config.options[o];
        const auto op = assemble_operator(config.grid.grid_for(option.maturity), p, env);
        const auto surface = solve_price(op, option);
        export_surface(surface, output_file(flags, "price_" + option_tag(o) + ".csv"));
        std::cout << "option " << o << " K=" << format_double(option.strike)
                  << " tau=" << format_double(option.maturity) << " price(x0)="
                  << format_double(price_at(surface, config.x0, start_vol(config, p), option.maturity)) << '\n';
    }
}

void cmd_sensitivities(const Flags& flags) {
    const auto config = resolve_config(flags);
    const auto p = resolve_params(config);
    const MarketEnv env{config.r, config.lambda_risk};
    for (std::size_t o = 0; o < config.options.size(); ++o) {
        const auto& option = config.options[o];
        const auto run = price_with_sensitivities(config.grid.grid_for(option.maturity), p, env, option);
        std::vector<std::string> names{"price"};
        std::vector<const Surface*> fields{&run.price};
        for (auto which : kAllParameters) {
            names.push_back("d_" + std::string(parameter_name(which)));
            fields.push_back(&run.sens.derivative(which));
        }
        export_surfaces(names, fields, output_file(flags, "sensitivities_" + option_tag(o) + ".csv"));
        std::cout << "option " << o << " sensitivities written\n";
    }
}

void cmd_impact(const Flags& flags) {
    const auto config = resolve_config(flags);
    const auto center = resolve_params(config);
    const auto em = run_bootstrap(config, center);
    write_error_model(output_file(flags, "covariance.csv"), em);
    const MarketEnv env{config.r, config.lambda_risk};

    for (std::size_t o = 0; o < config.options.size(); ++o) {
        const auto& option = config.options[o];
        const Grid grid = config.grid.grid_for(option.maturity);
        const auto run = price_with_sensitivities(grid, center, env, option);
        auto impact = impact_surfaces(run.sens, em, run.price, option.strike, config.s_lambda);
        if (config.box_density > 1) {
            const PricingPipeline pipeline = [&](const HestonParams& q) {
                return price_with_sensitivities(grid, q, env, option);
            };
            const auto sweep = sweep_box(em.box, config.box_density, center, em.sds, option.strike, pipeline,
                                         config.s_lambda, config.threads);
            auto eps_q = std::move(impact.eps_quadratic);
            impact = sweep.worst;
            impact.eps_quadratic = std::move(eps_q);
            std::cout << "box sweep: " << sweep.evaluated << " points, " << sweep.skipped << " infeasible\n";
        }
        const std::vector<std::string> names{"price",    "eps_kappa",     "eps_theta",  "eps_gamma", "eps_rho",
                                             "eps_bound", "eps_quadratic", "eps_lambda", "relative"};
        const std::vector<const Surface*> fields{&run.price,           &impact.per_param[0], &impact.per_param[1],
                                                 &impact.per_param[2], &impact.per_param[3], &impact.eps_bound,
                                                 &impact.eps_quadratic, &impact.eps_lambda, &impact.relative};
        export_surfaces(names, fields, output_file(flags, "impact_" + option_tag(o) + ".csv"));
        std::cout << "option " << o << " impact written\n";
    }
}

void cmd_calibrate_lambda(const Flags& flags) {
    const auto config = resolve_config(flags);
    if (config.pool.empty()) throw Error(ErrorCategory::InvalidArgument, "calibrate-lambda needs a pool manifest");
    const auto p = resolve_params(config);
    require_feasible(p);
    const auto pool = load_pool(config.pool, config.T);
    const auto table = build_ratio_table(pool, p, config.r, config.L_grid(), config.calibration_grid());
    const auto curve = curve_from_table(table);

    std::vector<std::vector<double>> rows;
    for (std::size_t l = 0; l < curve.L_grid.size(); ++l) rows.push_back({curve.L_grid[l], curve.values[l]});
    write_table(output_file(flags, "prederr.csv"), {"L", "prederr"}, rows);

    std::vector<std::pair<std::string, double>> summary{{"lambda_hat", curve.argmin}};
    std::cout << "lambda_hat=" << format_double(curve.argmin) << '\n';
    if (config.subset_size > 0) {
        const double s = lambda_error_bootstrap(table, config.subset_size);
        summary.emplace_back("s_lambda", s);
        std::cout << "s_lambda=" << format_double(s) << '\n';
    }
    write_key_values(output_file(flags, "lambda.csv"), summary);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Heston model estimation, pricing and sensitivity toolkit"};
    app.require_subcommand(1);
    Flags flags;
    app.add_option("--config", flags.config, "key = value config file")->check(CLI::ExistingFile);
    app.add_option("--seed", flags.seed, "random seed");
    app.add_option("--grid", flags.grid, "PDE grid as m,n,s");
    app.add_option("--threads", flags.threads, "worker threads");
    app.add_option("--out", flags.out, "output directory")->capture_default_str();
    app.add_option("--set", flags.sets, "config override key=value (repeatable)");

    struct Command {
        const char* name;
        const char* help;
        void (*run)(const Flags&);
    };
    const Command commands[] = {
        {"simulate", "simulate an observation series", cmd_simulate},
        {"estimate", "estimate parameters from a dataset", cmd_estimate},
        {"covariance", "bootstrap the estimator covariance", cmd_covariance},
        {"price", "solve the pricing PDE", cmd_price},
        {"sensitivities", "solve the parameter sensitivity PDEs", cmd_sensitivities},
        {"impact", "price error impact of parameter uncertainty", cmd_impact},
        {"calibrate-lambda", "estimate the market price of volatility risk", cmd_calibrate_lambda},
    };
    void (*selected)(const Flags&) = nullptr;
    for (const auto& c : commands) {
        auto* sub = app.add_subcommand(c.name, c.help);
        sub->fallthrough();
        sub->callback([&selected, run = c.run] { selected = run; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        selected(flags);
    } catch (const Error& e) {
        std::cerr << "error[" << category_name(e.category()) << "]: " << e.what() << '\n';
        return exit_code(e.category());
    } catch (const std::exception& e) {
        std::cerr << "error[internal]: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
