#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "hazval/estimators.hpp"
#include "hazval/grid_sample.hpp"
#include "hazval/kernel.hpp"
#include "hazval/selection.hpp"

namespace hazval {

// One Beta(a, b) density component (on the model window rescaled to [0,1]).
struct BetaComponent {
    double weight = 1.0;
    double a = 2.0;
    double b = 2.0;
};

struct HazardModel {
    enum class Kind { beta_mixture, exponential_decay, custom };

    Kind kind = Kind::custom;
    double t0 = 0.0, t_end = 1.0;
    std::function<double(double)> alpha;     // true hazard, > 0 on the interior
    std::function<double(double)> alpha_dd;  // its second derivative

    // alpha(t) = baseline + scale * sum_i w_i beta_pdf((t - t0)/len; a_i, b_i) / len
    static HazardModel beta_mixture(std::vector<BetaComponent> components, double scale,
                                    double baseline, double t0, double t_end);
    // alpha(t) = baseline + level * exp(-rate * (t - t0))
    static HazardModel exponential_decay(double level, double rate, double baseline,
                                         double t0, double t_end);
    static HazardModel custom(std::function<double(double)> alpha,
                              std::function<double(double)> alpha_dd, double t0,
                              double t_end);

    // Positivity on the interior and a finite-difference consistency check of
    // alpha_dd (1e-4 relative on the smooth interior).
    void validate() const;
};

enum class Truncation { none, uniform };

struct SimulationConfig {
    HazardModel model;
    int n = 0;
    int R = 500;
    Truncation truncation = Truncation::none;
    std::uint64_t seed = 0;
    int replications = 1;

    void validate() const;
};

// Expected exposure gamma(t) = n^{-1} E[Y(t)] (dimensionless occupancy).
struct GammaOracle {
    std::function<double(double)> gamma;

    static GammaOracle occupancy_one();
    // No-truncation occupancy: gamma(t) = exp(-int_{t0}^t alpha).
    static GammaOracle survival(const HazardModel& model);
};

// Draw one aggregated sample: sequentially over cells, O_r ~ Bi(risk_r,
// alpha(t_r) delta) and the risk set shrinks by O_r; survivors of the last
// cell are right censored. Uniform truncation draws each individual's entry
// cell uniformly over the grid. Deterministic in (seed, replication).
GridSample generate(const SimulationConfig& config, int replication = 0);

// n^{-1} sum_r (est.raw[r] - alpha(t_r))^2 Y_r w_r over defined cells.
double ise(const HazardEstimate& estimate, const HazardModel& model,
           const GridSample& sample, const WeightScheme& weights);

enum class BandwidthMethod { CV, OSCV_L, OSCV_R, DO, BO, ISE };

// A full Monte Carlo study: model and sampling plan plus the estimation and
// selection setup shared by all methods under comparison.
struct StudyConfig {
    SimulationConfig sim;
    EstimatorKind kind = EstimatorKind::LL;
    Kernel kernel = Kernel::epanechnikov();
    BandwidthGrid grid;
    WeightScheme weights;
    SideMode mode = SideMode::occurrence;
    int threads = 1;
};

// Monte Carlo mean of the ISE across replications (the m1 measure), with the
// bandwidth re-selected per replication by the given method. BandwidthMethod::ISE
// is the per-replication oracle: the grid bandwidth minimizing the true ISE.
double empirical_mise(BandwidthMethod method, const StudyConfig& study);

// Rerr(method) = [m1(CV) - m1(ISE)] / [m1(method) - m1(ISE)], all three
// measured on the same generated samples. degenerate is set when the
// denominator is <= 0 (the method matched the ISE oracle within noise).
struct RerrResult {
    double value = 0.0;
    bool degenerate = false;
    double m1_cv = 0.0, m1_method = 0.0, m1_ise = 0.0;
};
RerrResult rerr(BandwidthMethod method, const StudyConfig& study);

// Deterministic MISE-optimal bandwidth: C0 n^{-1/5} for LL, C0 n^{-1/9} for
// MBC, with C0 built from the equivalent (and twiced) kernel of `kernel`.
// The weight defaults to w == 1. Throws numeric_error when alpha'' (LL) or
// h = alpha (alpha''/alpha)'' (MBC) vanishes identically.
double mise_optimal_bandwidth(const HazardModel& model, const Kernel& kernel,
                              EstimatorKind kind, const GammaOracle& gamma, int n,
                              std::function<double(double)> weight = {});

// The S1/S2 functionals of the bandwidth CLTs; together with psi_factor they
// give the asymptotic variance S2 + S1 * Psi of any selector.
struct TheoremConstants {
    double s1 = 0.0;
    double s2 = 0.0;
};
TheoremConstants theorem_constants(const HazardModel& model, const Kernel& kernel,
                                   EstimatorKind kind, const GammaOracle& gamma,
                                   std::function<double(double)> weight = {});

}  // namespace hazval
