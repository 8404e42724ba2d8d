#include "hazval/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <thread>

#include "hazval/errors.hpp"
#include "hazval/quadrature.hpp"

namespace hazval {

namespace {

double beta_pdf(double u, double a, double b) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    const double lnB = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    return std::exp((a - 1.0) * std::log(u) + (b - 1.0) * std::log1p(-u) - lnB);
}

double beta_pdf_dd(double u, double a, double b) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    const double p = a - 1.0, q = b - 1.0;
    const double lnB = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    const double c = std::exp(-lnB);
    auto term = [&](double pe, double qe) {
        return std::pow(u, pe) * std::pow(1.0 - u, qe);
    };
    return c * (p * (p - 1.0) * term(p - 2.0, q) - 2.0 * p * q * term(p - 1.0, q - 1.0) +
                q * (q - 1.0) * term(p, q - 2.0));
}

}  // namespace

HazardModel HazardModel::beta_mixture(std::vector<BetaComponent> components, double scale,
                                      double baseline, double t0, double t_end) {
    if (components.empty()) throw validation_error("beta_mixture: need components");
    if (!(t_end > t0)) throw validation_error("beta_mixture: empty window");
    for (const BetaComponent& c : components)
        if (c.weight < 0.0 || !(c.a > 0.0) || !(c.b > 0.0))
            throw validation_error("beta_mixture: invalid component");
    const double len = t_end - t0;
    HazardModel m;
    m.kind = Kind::beta_mixture;
    m.t0 = t0;
    m.t_end = t_end;
    m.alpha = [=](double t) {
        const double u = (t - t0) / len;
        double s = 0.0;
        for (const BetaComponent& c : components) s += c.weight * beta_pdf(u, c.a, c.b);
        return baseline + scale * s / len;
    };
    m.alpha_dd = [=](double t) {
        const double u = (t - t0) / len;
        double s = 0.0;
        for (const BetaComponent& c : components) s += c.weight * beta_pdf_dd(u, c.a, c.b);
        return scale * s / (len * len * len);
    };
    return m;
}

HazardModel HazardModel::exponential_decay(double level, double rate, double baseline,
                                           double t0, double t_end) {
    if (!(t_end > t0)) throw validation_error("exponential_decay: empty window");
    if (level < 0.0 || baseline < 0.0 || level + baseline <= 0.0)
        throw validation_error("exponential_decay: hazard must be positive");
    HazardModel m;
    m.kind = Kind::exponential_decay;
    m.t0 = t0;
    m.t_end = t_end;
    m.alpha = [=](double t) { return baseline + level * std::exp(-rate * (t - t0)); };
    m.alpha_dd = [=](double t) {
        return level * rate * rate * std::exp(-rate * (t - t0));
    };
    return m;
}

HazardModel HazardModel::custom(std::function<double(double)> alpha,
                                std::function<double(double)> alpha_dd, double t0,
                                double t_end) {
    if (!alpha || !alpha_dd) throw validation_error("custom model: need alpha and alpha''");
    if (!(t_end > t0)) throw validation_error("custom model: empty window");
    HazardModel m;
    m.kind = Kind::custom;
    m.t0 = t0;
    m.t_end = t_end;
    m.alpha = std::move(alpha);
    m.alpha_dd = std::move(alpha_dd);
    return m;
}

void HazardModel::validate() const {
    if (!alpha || !alpha_dd) throw validation_error("HazardModel: need alpha and alpha''");
    const double len = t_end - t0;
    for (int i = 1; i < 200; ++i) {
        const double t = t0 + len * i / 200.0;
        if (!(this->alpha(t) > 0.0))
            throw validation_error("HazardModel: alpha not positive at t = " +
                                   std::to_string(t));
    }
    // finite-difference consistency of alpha'' on the smooth interior
    const double h = 0.002 * len;
    double scale = 0.0;
    for (int i = 0; i <= 20; ++i)
        scale = std::max(scale, std::abs(alpha_dd(t0 + len * (0.1 + 0.04 * i))));
    for (int i = 0; i <= 20; ++i) {
        const double t = t0 + len * (0.1 + 0.04 * i);
        const double fd = (-alpha(t - 2 * h) + 16 * alpha(t - h) - 30 * alpha(t) +
                           16 * alpha(t + h) - alpha(t + 2 * h)) /
                          (12 * h * h);
        if (std::abs(fd - alpha_dd(t)) > 1e-4 * std::max(scale, 1.0))
            throw validation_error("HazardModel: alpha'' inconsistent with alpha at t = " +
                                   std::to_string(t));
    }
}

void SimulationConfig::validate() const {
    if (!model.alpha) throw validation_error("SimulationConfig: model needs alpha");
    if (R < 2) throw validation_error("SimulationConfig: R must be >= 2");
    if (n < 1) throw validation_error("SimulationConfig: n must be >= 1");
    if (replications < 1) throw validation_error("SimulationConfig: replications >= 1");
}

namespace {

// splitmix64 counter generator; one independent stream per replication.
struct SplitMix {
    std::uint64_t s;
    explicit SplitMix(std::uint64_t seed) : s(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (s += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

std::uint64_t stream_seed(std::uint64_t seed, int replication) {
    SplitMix mix(seed ^ (0x9E3779B97F4A7C15ull *
                         (static_cast<std::uint64_t>(replication) + 1)));
    return mix.next();
}

}  // namespace

GridSample generate(const SimulationConfig& config, int replication) {
    config.validate();
    GridSample s = make_grid(config.model.t0, config.model.t_end, config.R, config.n);
    std::vector<double> p(s.R);
    for (int r = 0; r < s.R; ++r) {
        p[r] = config.model.alpha(s.time(r)) * s.delta;
        if (p[r] > 1.0)
            throw config_error("generate: alpha(t) * delta > 1 at cell " + std::to_string(r));
    }
    SplitMix rng(stream_seed(config.seed, replication));
    std::vector<int> entering(s.R, 0);
    if (config.truncation == Truncation::uniform) {
        for (int i = 0; i < config.n; ++i) {
            int e = static_cast<int>(rng.uniform() * s.R);
            entering[std::min(e, s.R - 1)] += 1;
        }
    } else {
        entering[0] = config.n;
    }
    long risk = 0;
    for (int r = 0; r < s.R; ++r) {
        risk += entering[r];
        s.exposures[r] = static_cast<double>(risk) * s.delta;
        long events = 0;
        for (long i = 0; i < risk; ++i) events += rng.uniform() < p[r];
        s.occurrences[r] = static_cast<double>(events);
        risk -= events;  // occurrences leave at the end of their cell
    }
    return s;
}

double ise(const HazardEstimate& estimate, const HazardModel& model,
           const GridSample& sample, const WeightScheme& weights) {
    if (estimate.R != sample.R) throw validation_error("ise: estimate/sample grid mismatch");
    const std::vector<double> w = weights.resolve(sample);
    double acc = 0.0;
    for (int r = 0; r < sample.R; ++r) {
        if (estimate.undefined_mask[r]) continue;
        const double d = estimate.raw[r] - model.alpha(sample.time(r));
        acc += d * d * sample.exposures[r] * w[r];
    }
    const double n = sample.n > 0 ? sample.n : 1.0;
    return acc / n;
}

GammaOracle GammaOracle::occupancy_one() {
    GammaOracle g;
    g.gamma = [](double) { return 1.0; };
    return g;
}

GammaOracle GammaOracle::survival(const HazardModel& model) {
    const int m = 4096;
    const double t0 = model.t0, len = model.t_end - model.t0, h = len / m;
    auto cum = std::make_shared<std::vector<double>>(m + 1, 0.0);
    double prev = model.alpha(t0 + 1e-12 * len);
    for (int i = 1; i <= m; ++i) {
        const double a = model.alpha(t0 + i * h);
        (*cum)[i] = (*cum)[i - 1] + 0.5 * h * (prev + a);
        prev = a;
    }
    GammaOracle g;
    g.gamma = [=](double t) {
        const double x = std::clamp((t - t0) / h, 0.0, static_cast<double>(m));
        const int i = std::min(static_cast<int>(x), m - 1);
        const double frac = x - i;
        return std::exp(-((1.0 - frac) * (*cum)[i] + frac * (*cum)[i + 1]));
    };
    return g;
}

namespace {

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
    threads = std::clamp(threads, 1, count);
    if (threads == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            for (int i = t; i < count; i += threads) fn(i);
        });
    for (std::thread& th : pool) th.join();
}

double compensated_mean(const std::vector<double>& v) {
    double sum = 0.0, c = 0.0;
    for (double x : v) {
        const double y = x - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    return sum / static_cast<double>(v.size());
}

HazardEstimate fit_at(const GridSample& sample, double b, const StudyConfig& study) {
    return study.kind == EstimatorKind::LL ? ll_hazard(sample, b, study.kernel)
                                           : mbc_hazard(sample, b, study.kernel);
}

double select_bandwidth(BandwidthMethod method, const GridSample& sample,
                        const StudyConfig& study) {
    switch (method) {
        case BandwidthMethod::CV:
            return select_cv(sample, study.grid, study.kind, study.kernel, study.weights)
                .bandwidth;
        case BandwidthMethod::OSCV_L:
            return select_oscv(sample, study.grid, study.kind, study.kernel, study.weights,
                               Side::left)
                .bandwidth;
        case BandwidthMethod::OSCV_R:
            return select_oscv(sample, study.grid, study.kind, study.kernel, study.weights,
                               Side::right)
                .bandwidth;
        case BandwidthMethod::DO:
            return select_do(sample, study.grid, study.kind, study.kernel, study.weights)
                .bandwidth;
        case BandwidthMethod::BO:
            return select_bo(sample, study.grid, study.kind, study.kernel, study.weights,
                             study.mode)
                .bandwidth;
        case BandwidthMethod::ISE: {
            int best = -1;
            double best_ise = 0.0;
            for (std::size_t i = 0; i < study.grid.values.size(); ++i) {
                const double b = study.grid.values[i];
                const double e =
                    ise(fit_at(sample, b, study), study.sim.model, sample, study.weights);
                if (best < 0 || e < best_ise) {
                    best = static_cast<int>(i);
                    best_ise = e;
                }
            }
            return study.grid.values[best];
        }
    }
    throw validation_error("select_bandwidth: unknown method");
}

}  // namespace

double empirical_mise(BandwidthMethod method, const StudyConfig& study) {
    study.sim.validate();
    std::vector<double> ises(study.sim.replications);
    parallel_for(study.sim.replications, study.threads, [&](int rep) {
        const GridSample sample = generate(study.sim, rep);
        const double b = select_bandwidth(method, sample, study);
        ises[rep] = ise(fit_at(sample, b, study), study.sim.model, sample, study.weights);
    });
    return compensated_mean(ises);
}

RerrResult rerr(BandwidthMethod method, const StudyConfig& study) {
    study.sim.validate();
    const int reps = study.sim.replications;
    std::vector<double> cv(reps), me(reps), oracle(reps);
    parallel_for(reps, study.threads, [&](int rep) {
        const GridSample sample = generate(study.sim, rep);
        auto eval = [&](BandwidthMethod m) {
            const double b = select_bandwidth(m, sample, study);
            return ise(fit_at(sample, b, study), study.sim.model, sample, study.weights);
        };
        cv[rep] = eval(BandwidthMethod::CV);
        me[rep] = eval(method);
        oracle[rep] = eval(BandwidthMethod::ISE);
    });
    RerrResult res;
    res.m1_cv = compensated_mean(cv);
    res.m1_method = compensated_mean(me);
    res.m1_ise = compensated_mean(oracle);
    const double denom = res.m1_method - res.m1_ise;
    if (denom <= 0.0) {
        res.degenerate = true;
        res.value = std::numeric_limits<double>::quiet_NaN();
    } else {
        res.value = (res.m1_cv - res.m1_ise) / denom;
    }
    return res;
}

namespace {

double window_integral(const std::function<double(double)>& f, double a, double b) {
    std::vector<double> cuts;
    for (int i = 1; i < 32; ++i) cuts.push_back(a + (b - a) * i / 32.0);
    return integrate_panels(f, a, b, cuts, 20);
}

// h(t) = alpha(t) * (alpha''/alpha)''(t), second derivative by a five-point
// stencil with the evaluation center clamped into the window.
std::function<double(double)> h_function(const HazardModel& model) {
    const double len = model.t_end - model.t0;
    const double h = 0.005 * len;
    return [=, alpha = model.alpha, add = model.alpha_dd](double t) {
        const double c = std::clamp(t, model.t0 + 2 * h, model.t_end - 2 * h);
        auto g = [&](double x) { return add(x) / alpha(x); };
        const double gdd =
            (-g(c - 2 * h) + 16 * g(c - h) - 30 * g(c) + 16 * g(c + h) - g(c + 2 * h)) /
            (12 * h * h);
        return alpha(t) * gdd;
    };
}

std::function<double(double)> unit_weight() {
    return [](double) { return 1.0; };
}

}  // namespace

double mise_optimal_bandwidth(const HazardModel& model, const Kernel& kernel,
                              EstimatorKind kind, const GammaOracle& gamma, int n,
                              std::function<double(double)> weight) {
    if (!weight) weight = unit_weight();
    if (n < 1) throw validation_error("mise_optimal_bandwidth: n must be >= 1");
    if (!model.alpha || !model.alpha_dd)
        throw validation_error("mise_optimal_bandwidth: need alpha and alpha''");
    const Kernel eq = equivalent_local_linear(kernel);
    const KernelMoments m = moments(eq);
    const double i_aw = window_integral(
        [&](double t) { return model.alpha(t) * weight(t); }, model.t0, model.t_end);
    if (kind == EstimatorKind::LL) {
        const double den = window_integral(
            [&](double t) {
                const double a2 = model.alpha_dd(t);
                return a2 * a2 * gamma.gamma(t) * weight(t);
            },
            model.t0, model.t_end);
        if (den <= 1e-16 * std::max(1.0, i_aw))
            throw numeric_error("mise_optimal_bandwidth: alpha'' vanishes, bandwidth unbounded");
        return std::pow(m.roughness_R * i_aw / (m.mu2 * m.mu2 * den), 0.2) *
               std::pow(static_cast<double>(n), -0.2);
    }
    if (kind != EstimatorKind::MBC)
        throw validation_error("mise_optimal_bandwidth: kind must be LL or MBC");
    const double r_gamma = moments(twicing(eq)).roughness_R;
    const auto hf = h_function(model);
    const double den = window_integral(
        [&](double t) {
            const double v = hf(t);
            return v * v * gamma.gamma(t) * weight(t);
        },
        model.t0, model.t_end);
    if (den <= 1e-16 * std::max(1.0, i_aw))
        throw numeric_error("mise_optimal_bandwidth: h vanishes, bandwidth unbounded");
    const double mu2_4 = std::pow(m.mu2, 4);
    return std::pow(r_gamma * i_aw / (0.5 * mu2_4 * den), 1.0 / 9.0) *
           std::pow(static_cast<double>(n), -1.0 / 9.0);
}

TheoremConstants theorem_constants(const HazardModel& model, const Kernel& kernel,
                                   EstimatorKind kind, const GammaOracle& gamma,
                                   std::function<double(double)> weight) {
    if (!weight) weight = unit_weight();
    if (!model.alpha || !model.alpha_dd)
        throw validation_error("theorem_constants: need alpha and alpha''");
    const auto& alpha = model.alpha;
    std::function<double(double)> curv =
        kind == EstimatorKind::LL ? model.alpha_dd : h_function(model);
    if (kind != EstimatorKind::LL && kind != EstimatorKind::MBC)
        throw validation_error("theorem_constants: kind must be LL or MBC");

    const double i_a2w2 = window_integral(
        [&](double t) {
            const double v = alpha(t) * weight(t);
            return v * v;
        },
        model.t0, model.t_end);
    const double i_aw = window_integral(
        [&](double t) { return alpha(t) * weight(t); }, model.t0, model.t_end);
    const double i_c2gw = window_integral(
        [&](double t) {
            const double c = curv(t);
            return c * c * gamma.gamma(t) * weight(t);
        },
        model.t0, model.t_end);
    const double i_c2gw2a = window_integral(
        [&](double t) {
            const double c = curv(t), w = weight(t);
            return c * c * gamma.gamma(t) * w * w * alpha(t);
        },
        model.t0, model.t_end);
    if (i_c2gw <= 0.0) throw numeric_error("theorem_constants: degenerate curvature");

    TheoremConstants out;
    if (kind == EstimatorKind::LL) {
        const KernelMoments m = moments(kernel);
        out.s1 = (1.0 / 25.0) * std::pow(m.roughness_R, -7.0 / 5.0) * i_a2w2 /
                 (std::pow(m.mu2, 6.0 / 5.0) * std::pow(i_c2gw, 3.0 / 5.0) *
                  std::pow(i_aw, -7.0 / 5.0));
        out.s2 = (4.0 / 25.0) * std::pow(m.roughness_R, -2.0 / 5.0) * i_c2gw2a /
                 (std::pow(m.mu2, 6.0 / 5.0) * std::pow(i_aw, 2.0 / 5.0) *
                  std::pow(i_c2gw, 8.0 / 5.0));
    } else {
        const double r_gamma =
            moments(twicing(equivalent_local_linear(kernel))).roughness_R;
        const double mu2 = moments(kernel).mu2;
        out.s1 = (std::pow(2.0, 1.0 / 3.0) / 81.0) * std::pow(r_gamma, -15.0 / 18.0) *
                 i_a2w2 /
                 (std::pow(mu2, 12.0 / 9.0) * std::pow(i_c2gw, 3.0 / 9.0) *
                  std::pow(i_aw, -15.0 / 9.0));
        out.s2 = (std::pow(2.0, 30.0 / 9.0) / 81.0) * std::pow(r_gamma, -6.0 / 9.0) *
                 i_c2gw2a /
                 (std::pow(mu2, 12.0 / 9.0) * std::pow(i_aw, 6.0 / 9.0) *
                  std::pow(i_c2gw, 12.0 / 9.0));
    }
    return out;
}

}  // namespace hazval
