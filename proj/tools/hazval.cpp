#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hazval/csv.hpp"
#include "hazval/errors.hpp"
#include "hazval/estimators.hpp"
#include "hazval/forecasting.hpp"
#include "hazval/kernel.hpp"
#include "hazval/kernel_constants.hpp"
#include "hazval/selection.hpp"
#include "hazval/simulation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

hazval::Kernel parse_kernel(const std::string& name) {
    if (name == "epanechnikov") return hazval::Kernel::epanechnikov();
    if (name == "quartic") return hazval::Kernel::quartic();
    if (name == "sextic") return hazval::Kernel::sextic();
    throw hazval::config_error("unknown kernel '" + name + "'");
}

hazval::EstimatorKind parse_estimator(const std::string& name) {
    if (name == "ll") return hazval::EstimatorKind::LL;
    if (name == "mbc") return hazval::EstimatorKind::MBC;
    throw hazval::config_error("unknown estimator '" + name + "'");
}

hazval::SideMode parse_side_mode(const std::string& name) {
    if (name == "occurrence") return hazval::SideMode::occurrence;
    if (name == "exposure") return hazval::SideMode::exposure;
    throw hazval::config_error("unknown side mode '" + name + "'");
}

hazval::BandwidthGrid parse_grid(const std::string& spec) {
    double min = 0.0, max = 0.0;
    int count = 0;
    char tail = 0;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%d%c", &min, &max, &count, &tail) != 3)
        throw hazval::config_error("bandwidth grid must be min:max:count, got '" + spec +
                                   "'");
    return hazval::BandwidthGrid::linspace(min, max, count);
}

hazval::WeightScheme parse_weights(const std::string& spec) {
    if (spec == "unit") return hazval::WeightScheme::unit_product();
    if (spec.rfind("custom:", 0) == 0)
        return hazval::WeightScheme::custom(hazval::load_weights_csv(spec.substr(7)));
    throw hazval::config_error("weights must be 'unit' or 'custom:<path>', got '" + spec +
                               "'");
}

fs::path prepare_out(const std::string& out) {
    fs::path dir = out.empty() ? fs::path(".") : fs::path(out);
    fs::create_directories(dir);
    return dir;
}

hazval::SelectionResult run_selection(const hazval::GridSample& sample,
                                      const std::string& method,
                                      const hazval::BandwidthGrid& grid,
                                      hazval::EstimatorKind kind,
                                      const hazval::Kernel& kernel,
                                      const hazval::WeightScheme& weights,
                                      hazval::SideMode mode) {
    if (method == "cv") return hazval::select_cv(sample, grid, kind, kernel, weights);
    if (method == "oscv-l")
        return hazval::select_oscv(sample, grid, kind, kernel, weights, hazval::Side::left);
    if (method == "oscv-r")
        return hazval::select_oscv(sample, grid, kind, kernel, weights,
                                   hazval::Side::right);
    if (method == "do") return hazval::select_do(sample, grid, kind, kernel, weights);
    if (method == "bo")
        return hazval::select_bo(sample, grid, kind, kernel, weights, mode);
    throw hazval::config_error("unknown method '" + method + "'");
}

const char* method_name(hazval::SelectionMethod m) {
    switch (m) {
        case hazval::SelectionMethod::CV: return "cv";
        case hazval::SelectionMethod::OSCV_L: return "oscv-l";
        case hazval::SelectionMethod::OSCV_R: return "oscv-r";
        case hazval::SelectionMethod::DO: return "do";
        case hazval::SelectionMethod::BO: return "bo";
    }
    return "?";
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

hazval::HazardModel model_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    const double t0 = j.value("t0", 0.0);
    const double t_end = j.value("t_end", 1.0);
    if (kind == "exponential_decay")
        return hazval::HazardModel::exponential_decay(j.at("level").get<double>(),
                                                      j.at("rate").get<double>(),
                                                      j.value("baseline", 0.0), t0, t_end);
    if (kind == "beta_mixture") {
        std::vector<hazval::BetaComponent> comps;
        for (const json& c : j.at("components"))
            comps.push_back({c.value("weight", 1.0), c.at("a").get<double>(),
                             c.at("b").get<double>()});
        return hazval::HazardModel::beta_mixture(std::move(comps), j.value("scale", 1.0),
                                                 j.value("baseline", 0.0), t0, t_end);
    }
    throw hazval::config_error("unknown model kind '" + kind + "'");
}

int run_fit(const std::string& input, const std::string& estimator,
            const std::string& kernel_name, double bandwidth, bool best_one_sided,
            const std::string& side_mode, const std::string& out) {
    const hazval::GridSample sample = hazval::load_grid_csv(input);
    const hazval::Kernel kernel = parse_kernel(kernel_name);
    const hazval::EstimatorKind kind = parse_estimator(estimator);
    const hazval::SideMode mode = parse_side_mode(side_mode);
    hazval::HazardEstimate est;
    if (best_one_sided)
        est = kind == hazval::EstimatorKind::LL
                  ? hazval::bo_ll_hazard(sample, bandwidth, kernel, mode)
                  : hazval::bo_mbc_hazard(sample, bandwidth, kernel, mode);
    else
        est = kind == hazval::EstimatorKind::LL
                  ? hazval::ll_hazard(sample, bandwidth, kernel)
                  : hazval::mbc_hazard(sample, bandwidth, kernel);
    const fs::path dir = prepare_out(out);
    hazval::write_hazard_csv((dir / "hazard.csv").string(), est);
    std::cout << "wrote " << (dir / "hazard.csv").string() << "\n";
    return 0;
}

int run_select(const std::string& input, const std::string& estimator,
               const std::string& method, const std::string& kernel_name,
               const std::string& grid_spec, const std::string& weights_spec,
               const std::string& side_mode, const std::string& out) {
    const hazval::GridSample sample = hazval::load_grid_csv(input);
    const hazval::SelectionResult res = run_selection(
        sample, method, parse_grid(grid_spec), parse_estimator(estimator),
        parse_kernel(kernel_name), parse_weights(weights_spec), parse_side_mode(side_mode));
    const fs::path dir = prepare_out(out);
    hazval::write_trace_csv((dir / "trace.csv").string(), res);
    std::ofstream sel((dir / "selection.csv").string(), std::ios::binary);
    sel << "method,estimator,bandwidth,minimum_at_grid_edge,multiple_local_minima,"
           "side_score_degenerate\n";
    sel << method_name(res.method) << ','
        << (res.estimator_kind == hazval::EstimatorKind::LL ? "ll" : "mbc") << ','
        << num(res.bandwidth) << ',' << int(res.minimum_at_grid_edge) << ','
        << int(res.multiple_local_minima) << ',' << int(res.side_score_degenerate) << '\n';
    std::cout << "bandwidth " << num(res.bandwidth) << "\n";
    return 0;
}

int run_simulate(const std::string& config_path, std::int64_t seed_override, int threads,
                 const std::string& out) {
    std::ifstream in(config_path);
    if (!in) throw hazval::config_error(config_path + ": cannot open config");
    json cfg;
    try {
        in >> cfg;
    } catch (const json::exception& e) {
        throw hazval::parse_error(config_path + ": " + e.what());
    }
    hazval::StudyConfig study;
    study.sim.model = model_from_json(cfg.at("model"));
    study.sim.model.validate();
    study.sim.n = cfg.at("n").get<int>();
    study.sim.R = cfg.value("R", 500);
    study.sim.truncation = cfg.value("truncation", std::string("none")) == "uniform"
                               ? hazval::Truncation::uniform
                               : hazval::Truncation::none;
    study.sim.seed = cfg.value("seed", 0ull);
    study.sim.replications = cfg.value("replications", 1);
    study.kind = parse_estimator(cfg.value("estimator", std::string("ll")));
    study.kernel = parse_kernel(cfg.value("kernel", std::string("epanechnikov")));
    const json& g = cfg.at("grid");
    study.grid = hazval::BandwidthGrid::linspace(g.at("min").get<double>(),
                                                 g.at("max").get<double>(),
                                                 g.value("count", 100));
    study.mode = parse_side_mode(cfg.value("side_mode", std::string("occurrence")));
    study.threads = threads;
    if (seed_override >= 0) study.sim.seed = static_cast<std::uint64_t>(seed_override);

    const std::string model_name = cfg.at("model").at("kind").get<std::string>();
    const fs::path dir = prepare_out(out);
    std::ofstream res((dir / "results.csv").string(), std::ios::binary);
    res << "model,n,method,m1,rerr\n";
    for (const json& mj : cfg.at("methods")) {
        const std::string name = mj.get<std::string>();
        hazval::BandwidthMethod method;
        if (name == "cv") method = hazval::BandwidthMethod::CV;
        else if (name == "oscv-l") method = hazval::BandwidthMethod::OSCV_L;
        else if (name == "oscv-r") method = hazval::BandwidthMethod::OSCV_R;
        else if (name == "do") method = hazval::BandwidthMethod::DO;
        else if (name == "bo") method = hazval::BandwidthMethod::BO;
        else if (name == "ise") method = hazval::BandwidthMethod::ISE;
        else throw hazval::config_error("unknown method '" + name + "'");
        if (method == hazval::BandwidthMethod::DO || method == hazval::BandwidthMethod::BO) {
            const hazval::RerrResult r = hazval::rerr(method, study);
            res << model_name << ',' << study.sim.n << ',' << name << ','
                << num(r.m1_method) << ','
                << (r.degenerate ? std::string("degenerate") : num(r.value)) << '\n';
        } else {
            res << model_name << ',' << study.sim.n << ',' << name << ','
                << num(hazval::empirical_mise(method, study)) << ",\n";
        }
    }
    std::cout << "wrote " << (dir / "results.csv").string() << "\n";
    return 0;
}

int run_forecast(const std::string& input, const std::string& estimator,
                 const std::string& method, const std::string& kernel_name,
                 const std::string& grid_spec, const std::string& side_mode,
                 bool component_weights_flag, const std::string& out) {
    const hazval::RunOffTriangle triangle = hazval::load_triangle_csv(input);
    auto [s1, s2] = hazval::reverse_components(triangle);
    const hazval::Kernel kernel = parse_kernel(kernel_name);
    const hazval::EstimatorKind kind = parse_estimator(estimator);
    const hazval::BandwidthGrid grid = parse_grid(grid_spec);
    const hazval::SideMode mode = parse_side_mode(side_mode);

    auto fit_component = [&](const hazval::GridSample& s,
                             const hazval::WeightScheme& w) {
        const double b =
            run_selection(s, method, grid, kind, kernel, w, mode).bandwidth;
        return kind == hazval::EstimatorKind::LL ? hazval::ll_hazard(s, b, kernel)
                                                 : hazval::mbc_hazard(s, b, kernel);
    };
    const hazval::WeightScheme unit = hazval::WeightScheme::unit_product();
    hazval::ComponentEstimates est =
        hazval::make_component_estimates(fit_component(s1, unit), fit_component(s2, unit));
    if (component_weights_flag) {
        // second pass with the survival-based weights of the first fit
        est = hazval::make_component_estimates(
            fit_component(s1, hazval::component_weights(1, est, s1)),
            fit_component(s2, hazval::component_weights(2, est, s2)));
    }
    const fs::path dir = prepare_out(out);
    hazval::write_hazard_csv((dir / "hazard1.csv").string(), est.alpha1_hat);
    hazval::write_hazard_csv((dir / "hazard2.csv").string(), est.alpha2_hat);
    hazval::write_forecast_csv((dir / "forecast.csv").string(),
                               hazval::forecast(triangle, est));
    hazval::write_forecast_csv((dir / "chain_ladder.csv").string(),
                               hazval::chain_ladder(triangle));
    std::cout << "wrote " << (dir / "forecast.csv").string() << "\n";
    return 0;
}

int run_constants(const std::string& kernel_name, const std::string& out) {
    const std::vector<std::string> kernels =
        kernel_name.empty() ? std::vector<std::string>{"epanechnikov", "quartic", "sextic"}
                            : std::vector<std::string>{kernel_name};
    struct RowSpec {
        const char* label;
        hazval::PsiMethod method;
    };
    const RowSpec rows[] = {{"bo", hazval::PsiMethod::BO},
                            {"do", hazval::PsiMethod::DO},
                            {"cv", hazval::PsiMethod::CV},
                            {"mise", hazval::PsiMethod::MISE}};
    std::ofstream csv;
    if (!out.empty()) {
        csv.open((prepare_out(out) / "constants.csv").string(), std::ios::binary);
        csv << "family,method,kernel,value\n";
    }
    for (const char* family : {"ll", "mbc"}) {
        const hazval::EstimatorFamily fam = std::string(family) == "ll"
                                                ? hazval::EstimatorFamily::LL
                                                : hazval::EstimatorFamily::MBC;
        for (const RowSpec& row : rows)
            for (const std::string& kn : kernels) {
                const double v = hazval::psi_factor(row.method, fam, parse_kernel(kn));
                std::cout << "psi " << family << ' ' << row.label << ' ' << kn << ' '
                          << num(v) << "\n";
                if (csv.is_open())
                    csv << family << ",psi_" << row.label << ',' << kn << ',' << num(v)
                        << '\n';
            }
        for (const std::string& kn : kernels) {
            const double v = hazval::rho_factor(fam, parse_kernel(kn));
            std::cout << "rho " << family << ' ' << kn << ' ' << num(v) << "\n";
            if (csv.is_open()) csv << family << ",rho," << kn << ',' << num(v) << '\n';
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonparametric hazard estimation with indirect cross-validation"};
    app.require_subcommand(1);

    std::string input, out, estimator = "ll", method = "cv", kernel = "epanechnikov";
    std::string grid_spec, weights_spec = "unit", side_mode = "occurrence";
    std::string config_path, constants_kernel;
    double bandwidth = 0.0;
    bool best_one_sided = false, component_weights_flag = false;
    std::int64_t seed = -1;
    int threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;

    CLI::App* fit = app.add_subcommand("fit", "Fit a hazard curve at a fixed bandwidth");
    fit->add_option("--input", input)->required();
    fit->add_option("--estimator", estimator);
    fit->add_option("--kernel", kernel);
    fit->add_option("--bandwidth", bandwidth)->required();
    fit->add_flag("--best-one-sided", best_one_sided);
    fit->add_option("--side-mode", side_mode);
    fit->add_option("--out", out);

    CLI::App* sel = app.add_subcommand("select", "Select a bandwidth by cross-validation");
    sel->add_option("--input", input)->required();
    sel->add_option("--estimator", estimator);
    sel->add_option("--method", method);
    sel->add_option("--kernel", kernel);
    sel->add_option("--bandwidth-grid", grid_spec)->required();
    sel->add_option("--weights", weights_spec);
    sel->add_option("--side-mode", side_mode);
    sel->add_option("--out", out);

    CLI::App* sim = app.add_subcommand("simulate", "Run a Monte Carlo study");
    sim->add_option("--config", config_path)->required();
    sim->add_option("--seed", seed);
    sim->add_option("--threads", threads);
    sim->add_option("--out", out);

    CLI::App* fc = app.add_subcommand("forecast", "Forecast a run-off triangle");
    fc->add_option("--input", input)->required();
    fc->add_option("--estimator", estimator);
    fc->add_option("--method", method);
    fc->add_option("--kernel", kernel);
    fc->add_option("--bandwidth-grid", grid_spec)->required();
    fc->add_option("--side-mode", side_mode);
    fc->add_flag("--component-weights", component_weights_flag);
    fc->add_option("--out", out);

    CLI::App* con = app.add_subcommand("constants", "Print the psi and rho constants");
    con->add_option("--kernel", constants_kernel);
    con->add_option("--out", out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (fit->parsed())
            return run_fit(input, estimator, kernel, bandwidth, best_one_sided, side_mode,
                           out);
        if (sel->parsed())
            return run_select(input, estimator, method, kernel, grid_spec, weights_spec,
                              side_mode, out);
        if (sim->parsed()) return run_simulate(config_path, seed, threads, out);
        if (fc->parsed())
            return run_forecast(input, estimator, method, kernel, grid_spec, side_mode,
                                component_weights_flag, out);
        if (con->parsed()) return run_constants(constants_kernel, out);
    } catch (const hazval::numeric_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const hazval::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
