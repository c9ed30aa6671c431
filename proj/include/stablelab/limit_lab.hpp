#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stablelab/cadlag.hpp"
#include "stablelab/gibbs_markov.hpp"
#include "stablelab/intermittent.hpp"
#include "stablelab/stable.hpp"
#include "stablelab/stats.hpp"

namespace stablelab {

struct SystemSpec {
    std::string name = "dyadic_renewal";  // heavy_bernoulli,
                                          // heavy_bernoulli_onesided,
                                          // markov_modulated, lsv2
    double alpha = 0.8;        // heavy shifts
    double p = 3.0;            // lsv2 cusp exponent
    double persistence = 0.7;  // markov_modulated
};

struct ObservableSpec {
    std::string name = "f_alpha";  // symbol, constant
    double alpha = 0.8;            // f_alpha
    std::int64_t factor = 1;       // symbol
    double value = 0.0;            // constant
};

struct ExperimentConfig {
    std::string experiment = "marginal";
    SystemSpec system;
    ObservableSpec observable;
    std::size_t n = 10000;
    std::size_t replicates = 2000;
    std::uint64_t seed = 20240901;
    int workers = 0;
    std::int64_t m0 = 0;
    std::int64_t cap = 1000000000;
    std::size_t permutations = 1000;
    std::vector<double> times{0.5, 1.0};
    std::vector<double> deltas{0.1, 0.05, 0.02, 0.01, 0.005, 0.001};
    std::vector<double> epsilons{0.25, 0.5, 1.0};
    std::vector<double> kappa_multipliers{0.5, 1, 2, 3, 4, 6, 8, 12};
    std::vector<std::size_t> n_grid{10, 100, 1000, 10000};
    std::vector<double> thresholds{100, 1000, 10000};
    double rho = 0.5;  // weighted-tail decay
    std::map<std::string, double> tolerances;
    std::string output_dir;

    double tolerance(const std::string& key, double fallback) const;

    static ExperimentConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

struct CheckResult {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string note;
};

struct ExperimentReport {
    std::string experiment;
    std::uint64_t seed = 0;
    nlohmann::json config_echo;
    std::vector<CheckResult> checks;
    std::map<std::string, double> metrics;
    std::size_t censored = 0;

    bool pass() const;
    void add(const std::string& name, double value, double tolerance,
             bool below = true, const std::string& note = "");
    nlohmann::json to_json() const;
    /// Writes {experiment}-{seed}.json (and .csv when rows were recorded)
    /// under dir; the JSON is reproducible byte for byte for a fixed
    /// (config, seed). Timing never enters the file.
    void write(const std::string& dir) const;

    std::string csv_header;
    std::vector<std::string> csv_rows;
};

std::unique_ptr<GibbsMarkovSystem> make_system(const SystemSpec& spec);
Observable make_observable(const ObservableSpec& spec,
                           const GibbsMarkovSystem& sys);

/// Per-replicate normalized partial-sum values at the checkpoint times:
/// value_i = (S_{floor(t_i n)} - (floor(t_i n)/n) A_n) / B_n. The marginal
/// experiment is the single-checkpoint case t = 1.
std::vector<double> replicate_checkpoints(const GibbsMarkovSystem& sys,
                                          const Observable& f, std::size_t n,
                                          const std::vector<double>& times,
                                          double An, double Bn, Rng& rng);

// --- experiments -------------------------------------------------------

/// Two-sample KS of (S_n(f) - A_n)/B_n against draws of the canonical
/// stable limit.
ExperimentReport marginal_test(const ExperimentConfig& cfg);

/// Finite-dimensional marginals: per-time KS, increment scaling KS, and
/// rank distance correlation of disjoint increments.
ExperimentReport fdd_test(const ExperimentConfig& cfg);

/// Exceedance tables of the moduli Delta_delta^{(j)} of the partial-sum
/// paths; monotone in delta by construction, and the smallest-delta column
/// must be small.
ExperimentReport tightness_diagnostic(const ExperimentConfig& cfg);

/// Lemma-style maximal inequalities: the two estimate bounds checked with
/// Monte Carlo slack, and the pathwise max-increment inclusion checked
/// exactly on every sampled path.
ExperimentReport maximal_inequality_check(const ExperimentConfig& cfg);

/// Tail-ratio stability of exponentially weighted sums
/// G_n = sum rho^{n-k} g(T^k x) with g = theta_f.
ExperimentReport weighted_tail_check(const ExperimentConfig& cfg);

/// J1-continuous functionals (sup, occupation fraction, largest jump) of
/// the partial-sum paths against the sampled reference Levy path.
ExperimentReport j1_convergence_probe(const ExperimentConfig& cfg);

/// Occupation-time law of the Z-extension against the generalized arcsine
/// CDF, both level conventions.
ExperimentReport arcsine_experiment(const ExperimentConfig& cfg);

/// Repeats the arcsine experiment with the doubled (non-ergodic) observable
/// and both start levels; every variant must meet the same bound.
ExperimentReport nonergodic_variant_check(const ExperimentConfig& cfg);

/// Hill tail fits of the per-side excursion times of the intermittent map,
/// raw and burned in, plus the side count ratio at a matched threshold.
ExperimentReport excursion_tail_experiment(const ExperimentConfig& cfg);

/// Independence of the two excursion-sum coordinates at time 1, via rank
/// distance correlation, joint-CDF factorization, and marginal shape KS
/// against the one-sided stable law.
ExperimentReport independence_test(const ExperimentConfig& cfg);

/// Conditional law of the excursion vector direction given a large norm:
/// axis weights per threshold, off-axis mass (exactly zero), stability of
/// the weights across thresholds.
ExperimentReport directional_tail_check(const ExperimentConfig& cfg);

/// Pathwise-exact invariants that need no Monte Carlo slack: oscillation
/// bounds, distortion of the affine instances, the max-increment
/// inclusion, disjoint excursion supports, J1 metric axioms.
ExperimentReport selftest(const ExperimentConfig& cfg);

/// Dispatch by cfg.experiment.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

}  // namespace stablelab
