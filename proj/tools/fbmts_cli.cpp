// fbmts: command-line front end.
//
//   fbmts analyze     --input FILE [--quantity P|S|both] [--format json|csv|md] [config flags]
//   fbmts simulate    --hurst H --n N --seed S [--method cholesky|circulant] [--out FILE]
//   fbmts gaussianize --input FILE [--levels]
//   fbmts estimate    --input FILE [--levels] [grid flags]
//   fbmts test        --input FILE --hurst H [test flags]
//
// Exit codes: 0 success, 2 input/parse error, 3 configuration error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fbmts/fbmts.hpp"

namespace {

constexpr int kExitInput = 2;
constexpr int kExitConfig = 3;

void write_output(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw fbmts::Error(fbmts::ErrorKind::input, "cannot write '" + path + "'");
    }
    out << text;
}

std::string format_double(double value)
{
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

void add_grid_flags(CLI::App& cmd, fbmts::HurstGrid& grid, double& q_constant)
{
    cmd.add_option("--grid_start,--grid-start", grid.start, "First Hurst grid value")->capture_default_str();
    cmd.add_option("--grid_stop,--grid-stop", grid.stop, "Last Hurst grid value")->capture_default_str();
    cmd.add_option("--grid_step,--grid-step", grid.step, "Hurst grid step, in [0.01, 0.1]")->capture_default_str();
    cmd.add_option("--q_constant,--q-constant", q_constant, "Numerator constant of Q (0.8 reproduces the legacy value)")
        ->capture_default_str();
}

void add_test_flags(CLI::App& cmd, fbmts::AnalysisConfig& config)
{
    cmd.add_option("--alpha", config.alpha, "Significance level of the B_n / D_n thresholds")->capture_default_str();
    cmd.add_option("--beta0", config.beta0, "Bound on the relative deviation of A_n from its limit")
        ->capture_default_str();
    cmd.add_flag("--paper_constants,--paper-constants", config.paper_constants,
                 "Use the tabulated threshold coefficients 4.95 / 4.08");
    cmd.add_flag("--delta_on_persistent,--delta-on-persistent", config.delta_on_persistent,
                 "Also require delta < beta0 when H > 0.5");
}

std::vector<double> read_series(const std::string& path, bool levels)
{
    auto values = fbmts::load_value_column(path);
    if (levels) {
        return fbmts::increments(values).values();
    }
    return values;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Fractional Brownian motion modelling of consumption time series"};
    app.require_subcommand(1);

    fbmts::AnalysisConfig config;
    std::string input;
    std::string output;
    std::string quantity = "both";
    std::string format = "json";
    std::string gap_policy = "drop";

    auto* analyze = app.add_subcommand("analyze", "Run the full per-building analysis on a long-format CSV");
    analyze->add_option("--input", input, "CSV with columns timestamp,building,quantity,value")->required();
    analyze->add_option("--quantity", quantity, "P, S or both")->check(CLI::IsMember({"P", "S", "both"}))
        ->capture_default_str();
    analyze->add_option("--format", format, "json, csv or md")->check(CLI::IsMember({"json", "csv", "md"}))
        ->capture_default_str();
    analyze->add_option("--out", output, "Output file (default stdout)");
    analyze->add_option("--ratio_tolerance,--ratio-tolerance", config.ratio_tolerance,
                        "Allowed distance of the achieved ratio from 2/pi")
        ->capture_default_str();
    analyze->add_option("--gap_policy,--gap-policy", gap_policy, "drop or interpolate-linear")
        ->check(CLI::IsMember({"drop", "interpolate-linear"}))
        ->capture_default_str();
    add_grid_flags(*analyze, config.grid, config.q_constant);
    add_test_flags(*analyze, config);

    double hurst = 0.0;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::string method;
    auto* simulate = app.add_subcommand("simulate", "Sample an fBm path on the grid k/n as CSV (t,value)");
    simulate->add_option("--hurst", hurst, "Hurst exponent in (0, 1)")->required();
    simulate->add_option("--n", n, "Number of grid steps")->required();
    simulate->add_option("--seed", seed, "64-bit seed")->required();
    simulate->add_option("--method", method, "cholesky or circulant (default: by size)")
        ->check(CLI::IsMember({"cholesky", "circulant"}));
    simulate->add_option("--out", output, "Output file (default stdout)");

    bool levels = false;
    auto* gaussianize = app.add_subcommand("gaussianize", "Fit the power transform to increments read from CSV");
    gaussianize->add_option("--input", input, "CSV whose last column holds the increments ('-' for stdin)")->required();
    gaussianize->add_flag("--levels", levels, "Input holds levels; difference them first");
    gaussianize->add_option("--ratio_tolerance,--ratio-tolerance", config.ratio_tolerance,
                            "Allowed distance of the achieved ratio from 2/pi")
        ->capture_default_str();
    gaussianize->add_option("--out", output, "Output file (default stdout)");

    auto* estimate = app.add_subcommand("estimate", "Estimate the Hurst exponent of Gaussianised increments");
    estimate->add_option("--input", input, "CSV whose last column holds the increments ('-' for stdin)")->required();
    estimate->add_flag("--levels", levels, "Input holds levels; difference them first");
    estimate->add_option("--out", output, "Output file (default stdout)");
    add_grid_flags(*estimate, config.grid, config.q_constant);

    auto* test = app.add_subcommand("test", "Test whether increments behave like fBm increments at a given H");
    test->add_option("--input", input, "CSV whose last column holds the increments ('-' for stdin)")->required();
    test->add_option("--hurst", hurst, "Hurst exponent in (0, 1)")->required();
    test->add_flag("--levels", levels, "Input holds levels; difference them first");
    test->add_option("--out", output, "Output file (default stdout)");
    add_test_flags(*test, config);

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    }
    catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    }
    catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*analyze) {
            config.gap_policy = fbmts::parse_gap_policy(gap_policy);
            config.validate();
            const auto report_format = fbmts::parse_report_format(format);
            const auto loaded = fbmts::load_csv(input, config.gap_policy);
            for (const auto& warning : loaded.warnings) {
                std::cerr << "warning: " << warning << "\n";
            }
            std::vector<fbmts::RawSeries> selected;
            for (const auto& s : loaded.series) {
                if (quantity == "both" || quantity == fbmts::to_string(s.quantity)) {
                    selected.push_back(s);
                }
            }
            const auto reports = fbmts::analyze_all(selected, config);
            write_output(output, fbmts::render_report(reports, report_format));
        }
        else if (*simulate) {
            const fbmts::HurstExponent h(hurst);
            if (n < 2) {
                throw fbmts::Error(fbmts::ErrorKind::configuration, "--n must be at least 2");
            }
            const auto sim_method =
                method.empty() ? fbmts::default_simulation_method(n) : fbmts::parse_simulation_method(method);
            const auto path = fbmts::simulate_fbm(h, n, seed, sim_method);
            std::string text = "t,value\n";
            for (std::size_t k = 0; k < path.values.size(); ++k) {
                text += format_double(path.time(k)) + "," + format_double(path.values[k]) + "\n";
            }
            write_output(output, text);
        }
        else if (*gaussianize) {
            fbmts::FitOptions options;
            options.tolerance = config.ratio_tolerance;
            const fbmts::IncrementSeries y(read_series(input, levels));
            const auto z = fbmts::gaussianize(y, options);
            std::string text = "# lambda=" + format_double(z.lambda) +
                               ",achieved_ratio=" + format_double(z.achieved_ratio) + ",m=" + std::to_string(z.size()) +
                               "\nz\n";
            for (double v : z.values) {
                text += format_double(v) + "\n";
            }
            write_output(output, text);
        }
        else if (*estimate) {
            config.grid.validate();
            const auto z = read_series(input, levels);
            fbmts::Json doc{{"schema_version", fbmts::kSchemaVersion}};
            doc.update(fbmts::to_json(fbmts::estimate_hurst(z, config.grid, config.q_constant)));
            write_output(output, doc.dump(2) + "\n");
        }
        else if (*test) {
            const auto z = read_series(input, levels);
            fbmts::Json doc{{"schema_version", fbmts::kSchemaVersion}};
            doc.update(fbmts::to_json(fbmts::test_hypothesis(z, hurst, config.test_options())));
            write_output(output, doc.dump(2) + "\n");
        }
    }
    catch (const fbmts::Error& e) {
        std::cerr << "fbmts: " << e.what() << "\n";
        const bool config_error = e.kind() == fbmts::ErrorKind::configuration || e.kind() == fbmts::ErrorKind::domain;
        return config_error ? kExitConfig : kExitInput;
    }
    return 0;
}
