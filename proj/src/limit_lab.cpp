#include "stablelab/limit_lab.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "stablelab/numeric.hpp"
#include "stablelab/parallel.hpp"
#include "stablelab/zextension.hpp"

namespace stablelab {

namespace {

constexpr std::uint64_t kRefTag = 0x726566706f6f6cULL;
constexpr std::uint64_t kPermTag = 0x7065726d746167ULL;
constexpr std::uint64_t kAuxTag = 0x6175787461670aULL;

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t tag) {
    std::uint64_t s = seed ^ tag;
    return splitmix64(s);
}

double binom_se(double p, std::size_t n) {
    return std::sqrt(std::max(p * (1.0 - p), 1e-12) / static_cast<double>(n));
}

}  // namespace

double ExperimentConfig::tolerance(const std::string& key,
                                   double fallback) const {
    auto it = tolerances.find(key);
    return it == tolerances.end() ? fallback : it->second;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    c.experiment = j.value("experiment", c.experiment);
    if (j.contains("system")) {
        const auto& s = j.at("system");
        c.system.name = s.value("name", c.system.name);
        c.system.alpha = s.value("alpha", c.system.alpha);
        c.system.p = s.value("p", c.system.p);
        c.system.persistence = s.value("persistence", c.system.persistence);
    }
    if (j.contains("observable")) {
        const auto& o = j.at("observable");
        c.observable.name = o.value("name", c.observable.name);
        c.observable.alpha = o.value("alpha", c.observable.alpha);
        c.observable.factor = o.value("factor", c.observable.factor);
        c.observable.value = o.value("value", c.observable.value);
    }
    c.n = j.value("n", c.n);
    c.replicates = j.value("replicates", c.replicates);
    c.seed = j.value("seed", c.seed);
    c.workers = j.value("workers", c.workers);
    c.m0 = j.value("m0", c.m0);
    c.cap = j.value("cap", c.cap);
    c.permutations = j.value("permutations", c.permutations);
    c.times = j.value("times", c.times);
    c.deltas = j.value("deltas", c.deltas);
    c.epsilons = j.value("epsilons", c.epsilons);
    c.kappa_multipliers = j.value("kappa_multipliers", c.kappa_multipliers);
    c.n_grid = j.value("n_grid", c.n_grid);
    c.thresholds = j.value("thresholds", c.thresholds);
    c.rho = j.value("rho", c.rho);
    c.output_dir = j.value("output_dir", c.output_dir);
    if (j.contains("tolerances"))
        for (auto& [k, v] : j.at("tolerances").items())
            c.tolerances[k] = v.get<double>();
    return c;
}

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json j;
    j["experiment"] = experiment;
    j["system"] = {{"name", system.name},
                   {"alpha", system.alpha},
                   {"p", system.p},
                   {"persistence", system.persistence}};
    j["observable"] = {{"name", observable.name},
                       {"alpha", observable.alpha},
                       {"factor", observable.factor},
                       {"value", observable.value}};
    j["n"] = n;
    j["replicates"] = replicates;
    j["seed"] = seed;
    j["workers"] = workers;
    j["m0"] = m0;
    j["cap"] = cap;
    j["permutations"] = permutations;
    j["times"] = times;
    j["deltas"] = deltas;
    j["epsilons"] = epsilons;
    j["kappa_multipliers"] = kappa_multipliers;
    j["n_grid"] = n_grid;
    j["thresholds"] = thresholds;
    j["rho"] = rho;
    j["output_dir"] = output_dir;
    j["tolerances"] = tolerances;
    return j;
}

bool ExperimentReport::pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

void ExperimentReport::add(const std::string& name, double value,
                           double tolerance, bool below,
                           const std::string& note) {
    CheckResult c;
    c.name = name;
    c.value = value;
    c.tolerance = tolerance;
    c.pass = below ? (value < tolerance) : (value >= tolerance);
    c.note = note;
    checks.push_back(std::move(c));
}

nlohmann::json ExperimentReport::to_json() const {
    nlohmann::json j;
    j["experiment"] = experiment;
    j["seed"] = seed;
    j["version"] = "0.1.0";
    j["config"] = config_echo;
    j["pass"] = pass();
    j["censored"] = censored;
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : checks)
        arr.push_back({{"name", c.name},
                       {"value", c.value},
                       {"tolerance", c.tolerance},
                       {"pass", c.pass},
                       {"note", c.note}});
    j["checks"] = arr;
    j["metrics"] = metrics;
    return j;
}

void ExperimentReport::write(const std::string& dir) const {
    if (dir.empty()) return;
    std::filesystem::create_directories(dir);
    std::string stem = experiment + "-" + std::to_string(seed);
    {
        std::ofstream os(std::filesystem::path(dir) / (stem + ".json"));
        os << to_json().dump(2) << "\n";
    }
    if (!csv_rows.empty()) {
        std::ofstream os(std::filesystem::path(dir) / (stem + ".csv"));
        os << csv_header << "\n";
        for (const auto& r : csv_rows) os << r << "\n";
    }
}

// --- factories -----------------------------------------------------------

namespace {

/// Sign-persistent modulation of the symmetric heavy shift behind the
/// Gibbs-Markov interface. The sign chain is reversible, so the backward
/// orbit construction uses the same kernel.
class ModulatedSystem final : public GibbsMarkovSystem {
public:
    ModulatedSystem(double alpha, double persistence)
        : mod_(alpha, persistence) {}

    const HeavyBernoulliShift& base() const { return mod_.base(); }

    std::string name() const override { return "markov_modulated"; }
    double theta() const override { return base().theta(); }
    double distortion_bound() const override { return 0.0; }
    double big_image_bound() const override { return 1.0; }
    Interval domain() const override { return base().domain(); }
    std::int64_t symbol_of(double x) const override {
        return base().symbol_of(x);
    }
    double apply(double x) const override { return base().apply(x); }
    Interval cylinder(std::int64_t s) const override {
        return base().cylinder(s);
    }
    double inverse_branch(std::int64_t s, double y) const override {
        return base().inverse_branch(s, y);
    }
    double invariant_sample(Rng& rng) const override {
        return base().invariant_sample(rng);
    }
    std::int64_t sample_symbol(Rng& rng) const override {
        return base().sample_symbol(rng);
    }
    std::vector<std::int64_t> stationary_symbols(std::size_t n,
                                                 Rng& rng) const override {
        return mod_.sample_symbols(n, rng);
    }
    std::vector<OrbitPoint> stationary_orbit(std::size_t n,
                                             Rng& rng) const override {
        auto symbols = mod_.sample_symbols(n + 1, rng);
        std::vector<OrbitPoint> orbit(n + 1);
        double x = base().invariant_sample(rng);
        orbit[n] = {base().inverse_branch(symbols[n], x), symbols[n]};
        for (std::size_t t = n; t-- > 0;)
            orbit[t] = {base().inverse_branch(symbols[t], orbit[t + 1].x),
                        symbols[t]};
        return orbit;
    }

private:
    MarkovModulatedShift mod_;
};

}  // namespace

std::unique_ptr<GibbsMarkovSystem> make_system(const SystemSpec& spec) {
    if (spec.name == "dyadic_renewal")
        return std::make_unique<DyadicRenewalMap>();
    if (spec.name == "heavy_bernoulli")
        return std::make_unique<HeavyBernoulliShift>(spec.alpha, true);
    if (spec.name == "heavy_bernoulli_onesided")
        return std::make_unique<HeavyBernoulliShift>(spec.alpha, false);
    if (spec.name == "markov_modulated")
        return std::make_unique<ModulatedSystem>(spec.alpha, spec.persistence);
    throw std::invalid_argument("make_system: unknown symbolic system '" +
                                spec.name + "'");
}

Observable make_observable(const ObservableSpec& spec,
                           const GibbsMarkovSystem& sys) {
    if (spec.name == "f_alpha") {
        if (sys.name() != "dyadic_renewal")
            throw std::invalid_argument("f_alpha expects the dyadic renewal map");
        return make_f_alpha(spec.alpha);
    }
    if (spec.name == "symbol" || spec.name == "symbol_scaled") {
        if (auto* h = dynamic_cast<const HeavyBernoulliShift*>(&sys))
            return make_symbol_observable(*h, spec.factor);
        if (auto* m = dynamic_cast<const ModulatedSystem*>(&sys))
            return make_symbol_observable(m->base(), spec.factor);
        throw std::invalid_argument("symbol observable expects a heavy shift");
    }
    if (spec.name == "constant") return make_constant_observable(spec.value);
    throw std::invalid_argument("make_observable: unknown observable '" +
                                spec.name + "'");
}

// --- replicate machinery ---------------------------------------------------

std::vector<double> replicate_checkpoints(const GibbsMarkovSystem& sys,
                                          const Observable& f, std::size_t n,
                                          const std::vector<double>& times,
                                          double An, double Bn, Rng& rng) {
    auto orbit = sys.stationary_orbit(n - 1, rng);  // x_0..x_{n-1}
    std::vector<double> out(times.size());
    std::size_t ti = 0;
    double sum = 0.0;
    const double dn = static_cast<double>(n);
    for (std::size_t k = 0; k <= n && ti < times.size(); ++k) {
        while (ti < times.size() &&
               static_cast<std::size_t>(times[ti] * dn) == k) {
            out[ti] = (sum - (static_cast<double>(k) / dn) * An) / Bn;
            ++ti;
        }
        if (k < n) sum += f(orbit[k].x, orbit[k].symbol);
    }
    return out;
}

namespace {

void validate_times(const std::vector<double>& times) {
    if (times.empty())
        throw std::invalid_argument("checkpoint times must be nonempty");
    double prev = 0.0;
    for (double t : times) {
        if (!(t > prev) || t > 1.0)
            throw std::invalid_argument(
                "checkpoint times must be strictly increasing in (0,1]");
        prev = t;
    }
}

struct NormalizedSetup {
    std::unique_ptr<GibbsMarkovSystem> sys;
    Observable f;
    StableParams params;
    double An = 0.0;
    double Bn = 1.0;
};

NormalizedSetup make_setup(const ExperimentConfig& cfg) {
    auto sys = make_system(cfg.system);
    Observable f = make_observable(cfg.observable, *sys);
    if (!f.has_tail())
        throw std::invalid_argument(
            "experiment requires an observable with a power tail");
    const TailModel tail = f.tail();
    if (tail.alpha == 1.0 && tail.c_plus != tail.c_minus)
        throw std::invalid_argument(
            "alpha = 1 supported only in the symmetric case");
    double Bn = canonical_Bn(tail, cfg.n);
    double An = canonical_An(tail, f.mean(), cfg.n);
    return NormalizedSetup{std::move(sys), std::move(f),
                           tail.limit_params(), An, Bn};
}

std::vector<double> run_checkpoint_matrix(const ExperimentConfig& cfg,
                                          const NormalizedSetup& s,
                                          const std::vector<double>& times) {
    std::vector<double> values(cfg.replicates * times.size());
    const GibbsMarkovSystem& sys = *s.sys;
    const Observable& f = s.f;
    parallel_replicates(
        cfg.replicates, cfg.workers, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t r = lo; r < hi; ++r) {
                Rng rng = Rng::for_replicate(cfg.seed, r);
                auto v = replicate_checkpoints(sys, f, cfg.n, times, s.An,
                                               s.Bn, rng);
                std::copy(v.begin(), v.end(),
                          values.begin() + r * times.size());
            }
        });
    return values;
}

std::vector<double> stable_reference_pool(const StableParams& params,
                                          std::size_t count,
                                          std::uint64_t seed, int workers,
                                          double scale = 1.0) {
    std::vector<double> pool(count);
    parallel_replicates(count, workers, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t r = lo; r < hi; ++r) {
            Rng rng = Rng::for_replicate(seed, r);
            pool[r] = scale * sample_stable(params, rng);
        }
    });
    return pool;
}

std::vector<double> column(const std::vector<double>& matrix,
                           std::size_t n_cols, std::size_t col) {
    std::vector<double> out(matrix.size() / n_cols);
    for (std::size_t r = 0; r < out.size(); ++r)
        out[r] = matrix[r * n_cols + col];
    return out;
}

}  // namespace

// --- marginal / fdd ---------------------------------------------------

ExperimentReport marginal_test(const ExperimentConfig& cfg) {
    NormalizedSetup s = make_setup(cfg);
    ExperimentReport rep;
    rep.experiment = "marginal";
    rep.seed = cfg.seed;
    rep.config_echo = cfg.to_json();

    std::vector<double> times{1.0};
    auto values = run_checkpoint_matrix(cfg, s, times);
    auto ref = stable_reference_pool(s.params, cfg.replicates,
                                     sub_seed(cfg.seed, kRefTag), cfg.workers);
    Rng perm(sub_seed(cfg.seed, kPermTag));
    KsResult ks = ks_two_sample(values, ref, cfg.permutations, perm);
    rep.add("ks_marginal", ks.distance, cfg.tolerance("ks", 0.03));
    rep.metrics["ks_p_value"] = ks.p_value;
    rep.metrics["Bn"] = s.Bn;
    rep.metrics["An"] = s.An;
    rep.write(cfg.output_dir);
    return rep;
}

ExperimentReport fdd_test(const ExperimentConfig& cfg) {
    validate_times(cfg.times);
    NormalizedSetup s = make_setup(cfg);
    const double alpha = s.params.alpha;
    ExperimentReport rep;
    rep.experiment = "fdd";
    rep.seed = cfg.seed;
    rep.config_echo = cfg.to_json();

    const std::size_t m = cfg.times.size();
    auto values = run_checkpoint_matrix(cfg, s, cfg.times);

    const double tol = cfg.tolerance("ks", 0.03);
    for (std::size_t i = 0; i < m; ++i) {
        auto vals = column(values, m, i);
        auto ref = stable_reference_pool(
            s.params, cfg.replicates, sub_seed(cfg.seed, kRefTag + i),
            cfg.workers, std::pow(cfg.times[i], 1.0 / alpha));
        rep.add("ks_time_" + std::to_string(i), ks_distance(vals, ref), tol);
    }

    for (std::size_t i = 0; i + 1 < m; ++i) {
        std::vector<double> head(cfg.replicates), inc(cfg.replicates);
        for (std::size_t r = 0; r < cfg.replicates; ++r) {
            head[r] = values[r * m + i];
            inc[r] = values[r * m + i + 1] - values[r * m + i];
        }
        double dt = cfg.times[i + 1] - cfg.times[i];
        auto ref = stable_reference_pool(
            s.params, cfg.replicates, sub_seed(cfg.seed, kRefTag + 100 + i),
            cfg.workers, std::pow(dt, 1.0 / alpha));
        rep.add("ks_increment_" + std::to_string(i), ks_distance(inc, ref),
                tol);
        rep.add("dcorr_increment_" + std::to_string(i),
                rank_distance_correlation(head, inc),
                cfg.tolerance("dcorr", 0.05));
    }
    rep.metrics["Bn"] = s.Bn;
    rep.write(cfg.output_dir);
    return rep;
}

// --- tightness diagnostics ------------------------------------------------

namespace {

/// Sparse-table range min/max over a fixed array, closed ranges.
class RangeMinMax {
public:
    explicit RangeMinMax(const std::vector<double>& v) : n_(v.size()) {
        int levels = 1;
        while ((std::size_t{1} << levels) <= n_) ++levels;
        mins_.assign(static_cast<std::size_t>(levels), v);
        maxs_.assign(static_cast<std::size_t>(levels), v);
        for (int l = 1; l < levels; ++l) {
            std::size_t half = std::size_t{1} << (l - 1);
            for (std::size_t i = 0; i + (std::size_t{1} << l) <= n_; ++i) {
                mins_[l][i] = std::min(mins_[l - 1][i], mins_[l - 1][i + half]);
                maxs_[l][i] = std::max(maxs_[l - 1][i], maxs_[l - 1][i + half]);
            }
        }
    }

    double min(std::size_t a, std::size_t b) const {
        int l = level(b - a + 1);
        return std::min(mins_[l][a], mins_[l][b + 1 - (std::size_t{1} << l)]);
    }
    double max(std::size_t a, std::size_t b) const {
        int l = level(b - a + 1);
        return std::max(maxs_[l][a], maxs_[l][b + 1 - (std::size_t{1} << l)]);
    }

private:
    static int level(std::size_t len) {
        int l = 0;
        while ((std::size_t{2} << l) <= len) ++l;
        return l;
    }
    std::size_t n_;
    std::vector<std::vector<double>> mins_;
    std::vector<std::vector<double>> maxs_;
};

double window_dist(const RangeMinMax& rmq, double center, std::size_t a,
                   std::size_t b) {
    if (a > b) return 0.0;
    return std::max(center - rmq.min(a, b), rmq.max(a, b) - center);
}

/// Smallest i with (i+1)/n > target (strict) or >= target (closed); the
/// initial guess is exact up to floating dust, the fixups are O(1).
std::size_t window_lo(std::size_t n, double target, bool strict) {
    if (target <= 0.0) return 0;
    const double dn = static_cast<double>(n);
    double guess = std::max(0.0, std::min(std::floor(target * dn) - 1.0, dn));
    auto lo = static_cast<std::size_t>(guess);
    if (strict) {
        while (lo < n && (static_cast<double>(lo) + 1.0) / dn <= target) ++lo;
        while (lo > 0 && static_cast<double>(lo) / dn > target) --lo;
    } else {
        while (lo < n && (static_cast<double>(lo) + 1.0) / dn < target) ++lo;
        while (lo > 0 && static_cast<double>(lo) / dn >= target) --lo;
    }
    return lo;
}

/// Largest i <= n with i/n <= target (closed) or < target (strict).
std::size_t window_hi(std::size_t n, double target, bool strict) {
    const double dn = static_cast<double>(n);
    double guess =
        std::max(0.0, std::min(std::floor(target * dn) + 1.0, dn));
    auto hi = static_cast<std::size_t>(guess);
    if (strict) {
        while (hi > 0 && static_cast<double>(hi) / dn >= target) --hi;
        while (hi < n && (static_cast<double>(hi) + 1.0) / dn < target) ++hi;
    } else {
        while (hi > 0 && static_cast<double>(hi) / dn > target) --hi;
        while (hi < n && (static_cast<double>(hi) + 1.0) / dn <= target) ++hi;
    }
    return hi;
}

/// Delta^(3) of the scalar partial-sum step path (values v_k on
/// [k/n,(k+1)/n), v_n at 1). For step paths the sup is attained with the
/// middle time at a segment start or just before a segment end; both
/// candidate families are scanned with exact window boundaries.
double delta3_scan(const std::vector<double>& v, double delta,
                   const RangeMinMax& rmq) {
    const std::size_t n = v.size() - 1;
    const double dn = static_cast<double>(n);
    double best = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
        const double tA = static_cast<double>(k) / dn;
        {
            std::size_t lo = window_lo(n, tA - delta, true);
            std::size_t hi = std::max(k, window_hi(n, tA + delta, false));
            double L = (k == 0) ? 0.0 : window_dist(rmq, v[k], lo, k - 1);
            double R = window_dist(rmq, v[k], k, hi);
            best = std::max(best, std::min(L, R));
        }
        if (k < n) {
            const double tB = static_cast<double>(k + 1) / dn;
            std::size_t lo = window_lo(n, tB - delta, false);
            std::size_t hi = std::max(k, window_hi(n, tB + delta, true));
            double L = window_dist(rmq, v[k], lo, k);
            double R = (hi <= k) ? 0.0 : window_dist(rmq, v[k], k + 1, hi);
            best = std::max(best, std::min(L, R));
        }
    }
    return best;
}

}  // namespace

ExperimentReport tightness_diagnostic(const ExperimentConfig& cfg) {
    NormalizedSetup s = make_setup(cfg);
    ExperimentReport rep;
    rep.experiment = "tightness";
    rep.seed = cfg.seed;
    rep.config_echo = cfg.to_json();

    const std::size_t nd = cfg.deltas.size();
    const std::size_t ne = cfg.epsilons.size();
    const GibbsMarkovSystem& sys = *s.sys;
    const Observable& f = s.f;
    const std::size_t n = cfg.n;
    const double dn = static_cast<double>(n);

    std::vector<double> moduli(cfg.replicates * 3 * nd);
    parallel_replicates(cfg.replicates, cfg.workers, [&](std::size_t lo,
                                                         std::size_t hi) {
        std::vector<double> v(n + 1);
        for (std::size_t r = lo; r < hi; ++r) {
            Rng rng = Rng::for_replicate(cfg.seed, r);
            auto orbit = sys.stationary_orbit(n - 1, rng);
            double sum = 0.0;
            v[0] = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                sum += f(orbit[k].x, orbit[k].symbol);
                v[k + 1] =
                    (sum - (static_cast<double>(k + 1) / dn) * s.An) / s.Bn;
            }
            RangeMinMax rmq(v);
            for (std::size_t di = 0; di < nd; ++di) {
                double delta = cfg.deltas[di];
                std::size_t k1 = static_cast<std::size_t>(
                    std::min(dn, std::floor(delta * dn)));
                double d1 = window_dist(rmq, v[0], 0, k1);
                std::size_t k2 = static_cast<std::size_t>(
                    std::max(0.0, std::floor((1.0 - delta) * dn)));
                double d2 = window_dist(rmq, v[n], std::min(k2, n), n);
                double d3 = delta3_scan(v, delta, rmq);
                moduli[(r * 3 + 0) * nd + di] = d1;
                moduli[(r * 3 + 1) * nd + di] = d2;
                moduli[(r * 3 + 2) * nd + di] = d3;
            }
        }
    });

    std::vector<std::size_t> exceed(3 * nd * ne, 0);
    for (std::size_t r = 0; r < cfg.replicates; ++r)
        for (int j = 0; j < 3; ++j)
            for (std::size_t di = 0; di < nd; ++di)
                for (std::size_t ei = 0; ei < ne; ++ei)
                    if (moduli[(r * 3 + j) * nd + di] > cfg.epsilons[ei])
                        ++exceed[(static_cast<std::size_t>(j) * nd + di) * ne +
                                 ei];

    const double N = static_cast<double>(cfg.replicates);
    auto p_at = [&](int j, std::size_t di, std::size_t ei) {
        return static_cast<double>(
                   exceed[(static_cast<std::size_t>(j) * nd + di) * ne + ei]) /
               N;
    };

    rep.csv_header = "j,delta,epsilon,exceedance";
    for (int j = 0; j < 3; ++j)
        for (std::size_t di = 0; di < nd; ++di)
            for (std::size_t ei = 0; ei < ne; ++ei) {
                std::ostringstream row;
                row << (j + 1) << "," << cfg.deltas[di] << ","
                    << cfg.epsilons[ei] << "," << p_at(j, di, ei);
                rep.csv_rows.push_back(row.str());
            }

    // deltas are listed decreasing; the moduli are monotone in delta
    // pathwise, so on a shared pool the table is monotone exactly. The 2 SE
    // slack only matters if the pools ever diverge.
    double worst = -1.0;
    for (int j = 0; j < 3; ++j)
        for (std::size_t ei = 0; ei < ne; ++ei)
            for (std::size_t di = 0; di + 1 < nd; ++di) {
                double pbig = p_at(j, di, ei);
                double psmall = p_at(j, di + 1, ei);
                double slack =
                    2.0 * std::sqrt(std::pow(binom_se(pbig, cfg.replicates), 2) +
                                    std::pow(binom_se(psmall, cfg.replicates), 2));
                worst = std::max(worst, psmall - pbig - slack);
            }
    rep.add("monotonicity_violation", worst, 0.0,
            true, "exceedance must not grow as delta shrinks");

    std::size_t ei_mid = ne / 2;
    double small_col = 0.0;
    for (int j = 0; j < 3; ++j)
        small_col = std::max(small_col, p_at(j, nd - 1, ei_mid));
    rep.add("smallest_delta_exceedance", small_col,
            cfg.tolerance("tightness_small_delta", 0.02));
    rep.write(cfg.output_dir);
    return rep;
}

// --- maximal inequalities ---------------------------------------------------

ExperimentReport maximal_inequality_check(const ExperimentConfig& cfg) {
    NormalizedSetup s = make_setup(cfg);
    ExperimentReport rep;
    rep.experiment = "maxineq";
    rep.seed = cfg.seed;
    rep.config_echo = cfg.to_json();

    const GibbsMarkovSystem& sys = *s.sys;
    const Observable& f = s.f;
    const std::size_t n = cfg.n;
    const std::size_t N = cfg.replicates;
    const double theta = sys.theta();
    const double c41 = 2.0 * std::exp(sys.distortion_bound()) /
                       sys.big_image_bound();
    const double c43 = 0.5 * c41;

    std::vector<double> kappas;
    for (double mlt : cfg.kappa_multipliers) kappas.push_back(mlt * s.Bn);
    const std::size_t nk = kappas.size();

    std::vector<std::size_t> max_over(nk, 0), max_over4(nk, 0),
        triple_over(nk, 0), incl42_viol(nk, 0);
    std::vector<std::size_t> snorm_exceed(nk * (n + 1), 0);
    std::vector<std::size_t> theta_exceed(nk * (n + 1), 0);

    for (std::size_t r = 0; r < N; ++r) {
        Rng rng = Rng::for_replicate(cfg.seed, r);
        auto orbit = sys.stationary_orbit(n - 1, rng);
        std::vector<double> S(n + 1, 0.0), Th(n + 1, 0.0);
        double acc_s = 0.0, acc_th = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            acc_s += f(orbit[k].x, orbit[k].symbol);
            acc_th = theta * (acc_th + f.lipschitz(orbit[k].symbol));
            S[k + 1] = acc_s;
            Th[k + 1] = acc_th;
        }
        double max_abs = 0.0, max_tail_diff = 0.0;
        for (std::size_t k = 1; k <= n; ++k) {
            max_abs = std::max(max_abs, std::fabs(S[k]));
            max_tail_diff = std::max(max_tail_diff, std::fabs(S[n] - S[k]));
        }
        // max over 1 <= i < j < l <= n of min(|S_j-S_i|, |S_l-S_j|)
        std::vector<double> pre_min(n + 1), pre_max(n + 1), suf_min(n + 2),
            suf_max(n + 2);
        pre_min[1] = S[1];
        pre_max[1] = S[1];
        for (std::size_t k = 2; k <= n; ++k) {
            pre_min[k] = std::min(pre_min[k - 1], S[k]);
            pre_max[k] = std::max(pre_max[k - 1], S[k]);
        }
        suf_min[n] = S[n];
        suf_max[n] = S[n];
        for (std::size_t k = n; k-- > 1;) {
            suf_min[k] = std::min(suf_min[k + 1], S[k]);
            suf_max[k] = std::max(suf_max[k + 1], S[k]);
        }
        double triple = 0.0;
        for (std::size_t j = 2; j < n; ++j) {
            double left = std::max(S[j] - pre_min[j - 1], pre_max[j - 1] - S[j]);
            double right =
                std::max(suf_max[j + 1] - S[j], S[j] - suf_min[j + 1]);
            triple = std::max(triple, std::min(left, right));
        }

        for (std::size_t ki = 0; ki < nk; ++ki) {
            double kappa = kappas[ki];
            if (max_abs > kappa) ++max_over[ki];
            if (max_abs > kappa / 4.0) ++max_over4[ki];
            if (triple > kappa) ++triple_over[ki];
            if (max_tail_diff > kappa && !(max_abs > kappa / 2.0))
                ++incl42_viol[ki];
            for (std::size_t k = 1; k <= n; ++k) {
                if (std::fabs(S[k]) > kappa / 4.0)
                    ++snorm_exceed[ki * (n + 1) + k];
                if (Th[k] > kappa / 4.0) ++theta_exceed[ki * (n + 1) + k];
            }
        }
    }

    const double dN = static_cast<double>(N);
    std::size_t viol41 = 0, viol42 = 0, viol43 = 0;
    rep.csv_header = "kappa,lhs41,rhs41,lhs43,rhs43";
    for (std::size_t ki = 0; ki < nk; ++ki) {
        double pmax_s = 0.0, pmax_th = 0.0;
        for (std::size_t k = 1; k <= n; ++k) {
            pmax_s = std::max(pmax_s,
                              static_cast<double>(snorm_exceed[ki * (n + 1) + k]) /
                                  dN);
            pmax_th = std::max(
                pmax_th,
                static_cast<double>(theta_exceed[ki * (n + 1) + k]) / dN);
        }
        double L41 = static_cast<double>(max_over[ki]) / dN;
        double R41 = c41 * pmax_s + static_cast<double>(n) * pmax_th;
        double se41 = binom_se(L41, N) + c41 * binom_se(pmax_s, N) +
                      static_cast<double>(n) * binom_se(pmax_th, N);
        if (L41 > R41 + 3.0 * se41 && R41 + 3.0 * se41 < 1.0) ++viol41;

        double A = static_cast<double>(max_over4[ki]) / dN;
        double L43 = static_cast<double>(triple_over[ki]) / dN;
        double inner = A + static_cast<double>(n) * pmax_th;
        double R43 = c43 * A * inner;
        double seA = binom_se(A, N);
        double se43 = binom_se(L43, N) +
                      c43 * (seA * inner +
                             A * (seA + static_cast<double>(n) *
                                            binom_se(pmax_th, N)));
        if (L43 > R43 + 3.0 * se43 && R43 + 3.0 * se43 < 1.0) ++viol43;
        viol42 += incl42_viol[ki];

        std::ostringstream row;
        row << kappas[ki] << "," << L41 << "," << R41 << "," << L43 << ","
            << R43;
        rep.csv_rows.push_back(row.str());
    }

    rep.add("violations_eq41", static_cast<double>(viol41), 0.5);
    rep.add("violations_eq42_pathwise", static_cast<double>(viol42), 0.5);
    rep.add("violations_eq43", static_cast<double>(viol43), 0.5);
    rep.write(cfg.output_dir);
    return rep;
}

// --- weighted tails ---------------------------------------------------------

namespace {

/// Exact tail mu(theta_f > s) of the cylinder Lipschitz function of
/// f_alpha over the dyadic map: theta_f = (2/alpha) 2^{k/alpha} on Z_k.
double f_alpha_theta_tail(double alpha, double s) {
    if (s <= 0.0) return 1.0;
    double k0 = std::floor(alpha * std::log2(s * alpha / 2.0)) + 1.0;
    if (k0 < 1.0) k0 = 1.0;
    return std::exp2(1.0 - k0);
}

}  // namespace

ExperimentReport weighted_tail_check(const ExperimentConfig& cfg) {
    NormalizedSetup s = make_setup(cfg);
    if (s.f.name() != "f_alpha")
        throw std::invalid_argument(
            "weighted_tail_check needs the f_alpha observable");
    const double alpha = s.f.tail().alpha;
    ExperimentReport rep;
    rep.experiment = "weighted_tail";
    rep.seed = cfg.seed;
    rep.config_echo = cfg.to_json();

    const GibbsMarkovSystem& sys = *s.sys;
    const Observable& f = s.f;
    const double rho = cfg.rho;
    if (!(rho > 0.0) || !(rho < 1.0))
        throw std::invalid_argument("weighted_tail_check: rho in (0,1)");

    // s-grid anchored at exact tail levels of g = theta_f
    std::vector<double> tail_levels{0.1, 0.03, 0.01};
    std::vector<double> sgrid;
    for (double tl : tail_levels) {
        // invert the staircase tail approximately: s with tau(s) ~ tl
        double k0 = 1.0 - std::log2(tl);
        sgrid.push_back((2.0 / alpha) * std::exp2((k0 - 0.5) / alpha));
    }

    double sup_min = 1e300, sup_max = 0.0;
    rep.csv_header = "n,s,ratio";
    for (std::size_t ng : cfg.n_grid) {
        std::vector<double> gsum(cfg.replicates);
        parallel_replicates(
            cfg.replicates, cfg.workers, [&](std::size_t lo, std::size_t hi) {
                for (std::size_t r = lo; r < hi; ++r) {
                    Rng rng = Rng::for_replicate(
                        sub_seed(cfg.seed, kAuxTag + ng), r);
                    auto symbols = sys.stationary_symbols(ng, rng);
                    double acc = 0.0;
                    for (std::size_t k = 0; k < ng; ++k)
                        acc = rho * (acc + f.lipschitz(symbols[k]));
                    gsum[r] = acc;
                }
            });
        double sup_ratio = 0.0;
        for (double sv : sgrid) {
            std::size_t cnt = 0;
            for (double v : gsum)
                if (v > sv) ++cnt;
            double ratio = (static_cast<double>(cnt) /
                            static_cast<double>(cfg.replicates)) /
                           f_alpha_theta_tail(alpha, sv);
            sup_ratio = std::max(sup_ratio, ratio);
            std::ostringstream row;
            row << ng << "," << sv << "," << ratio;
            rep.csv_rows.push_back(row.str());
        }
        rep.metrics["sup_ratio_n" + std::to_string(ng)] = sup_ratio;
        sup_min = std::min(sup_min, sup_ratio);
        sup_max = std::max(sup_max, sup_ratio);
    }
    rep.metrics["zeta_hat"] = sup_max;
    rep.add("sup_ratio_spread", sup_max / std::max(sup_min, 1e-300),
            cfg.tolerance("sup_spread", 1.35), true,
            "uniformity of the tail ratio across n");
    rep.write(cfg.output_dir);
    return rep;
}

// --- J1 functional probe ---------------------------------------------------

ExperimentReport j1_convergence_probe(const ExperimentConfig& cfg) {
    NormalizedSetup s = make_setup(cfg);
    ExperimentReport rep;
    rep.experiment = "j1probe";
    rep.seed = cfg.seed;
    rep.config_echo = cfg.to_json();

    const GibbsMarkovSystem& sys = *s.sys;
    const Observable& f = s.f;
    const std::size_t n = cfg.n;
    const double dn = static_cast<double>(n);
    const double alpha = s.params.alpha;
    const std::size_t N = cfg.replicates;

    std::vector<double> sup_d(N), psi_d(N), jump_d(N);
    parallel_replicates(N, cfg.workers, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t r = lo; r < hi; ++r) {
            Rng rng = Rng::for_replicate(cfg.seed, r);
            auto orbit = sys.stationary_orbit(n - 1, rng);
            double sum = 0.0, prev = 0.0;
            double smax = 0.0, jmax = 0.0;
            std::size_t pos = 0;
            for (std::size_t k = 0; k < n; ++k) {
                if (prev > 0.0) ++pos;  // value held on [k/n,(k+1)/n)
                double inc = f(orbit[k].x, orbit[k].symbol);
                sum += inc;
                double v = (sum - (static_cast<double>(k + 1) / dn) * s.An) /
                           s.Bn;
                smax = std::max(smax, std::fabs(v));
                jmax = std::max(jmax, std::fabs(v - prev));
                prev = v;
            }
            sup_d[r] = smax;
            psi_d[r] = static_cast<double>(pos) / dn;
            jump_d[r] = jmax;
        }
    });

    std::vector<double> sup_r(N), psi_r(N), jump_r(N);
    parallel_replicates(N, cfg.workers, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t r = lo; r < hi; ++r) {
            Rng rng = Rng::for_replicate(sub_seed(cfg.seed, kRefTag), r);
            double cell = std::pow(1.0 / dn, 1.0 / alpha);
            double sum = 0.0, prev = 0.0, smax = 0.0, jmax = 0.0;
            std::size_t pos = 0;
            for (std::size_t k = 0; k < n; ++k) {
                if (prev > 0.0) ++pos;
                double inc = cell * sample_stable(s.params, rng);
                sum += inc;
                smax = std::max(smax, std::fabs(sum));
                jmax = std::max(jmax, std::fabs(inc));
                prev = sum;
            }
            sup_r[r] = smax;
            psi_r[r] = static_cast<double>(pos) / dn;
            jump_r[r] = jmax;
        }
    });

    const double tol = cfg.tolerance("ks_probe", 0.04);
    rep.add("ks_sup_functional", ks_distance(sup_d, sup_r), tol);
    rep.add("ks_largest_jump", ks_distance(jump_d, jump_r), tol);
    rep.add("ks_occupation_functional", ks_distance(psi_d, psi_r), tol);
    if (s.params.symmetric()) {
        ArcsineParams arc(0.5);
        double d = ks_one_sample(
            psi_d, [&](double t) {
                return arcsine_cdf(arc, std::clamp(t, 0.0, 1.0));
            });
        rep.add("ks_occupation_vs_arcsine", d,
                cfg.tolerance("ks_arcsine", 0.05));
    } else {
        rep.metrics["occupation_mean"] =
            std::accumulate(psi_d.begin(), psi_d.end(), 0.0) /
            static_cast<double>(N);
    }
    rep.write(cfg.output_dir);
    return rep;
}

// --- arcsine (Z-extension) ---------------------------------------------------

namespace {

void validate_arcsine_hypotheses(const Observable& f) {
    if (!f.integer_valued())
        throw std::invalid_argument("arcsine: integer observable required");
    const TailModel& t = f.tail();
    if (t.alpha > 1.0) {
        if (!f.mean() || std::fabs(*f.mean()) > 1e-12)
            throw std::invalid_argument(
                "arcsine: alpha > 1 requires a centered observable");
    }
    if (t.alpha == 1.0 && t.c_plus != t.c_minus)
        throw std::invalid_argument(
            "arcsine: alpha = 1 requires a symmetric observable");
}

}  // namespace

ExperimentReport arcsine_experiment(const ExperimentConfig& cfg) {
    auto sys = make_system(cfg.system);
    Observable f = make_observable(cfg.observable, *sys);
    if (!f.has_tail())
        throw std::invalid_argument("arcsine: observable has no power tail");
    validate_arcsine_hypotheses(f);

    ExperimentReport rep;
    rep.experiment = "arcsine";
    rep.seed = cfg.seed;
    rep.config_echo = cfg.to_json();

    const std::size_t N = cfg.replicates;
    std::vector<double> frac1(N), frac0(N);
    const GibbsMarkovSystem& system = *sys;
    const std::int64_t factor = cfg.observable.factor;
    parallel_replicates(N, cfg.workers, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t r = lo; r < hi; ++r) {
            Rng rng = Rng::for_replicate(cfg.seed, r);
            auto fr = occupation_fractions(system, factor, cfg.m0, cfg.n, rng);
            frac1[r] = fr.frac_level_ge1;
            frac0[r] = fr.frac_level_ge0;
        }
    });

    StableParams params = f.tail().limit_params();
    double rho;
    if (params.symmetric()) {
        rho = 0.5;
    } else {
        Rng rng(sub_seed(cfg.seed, kAuxTag));
        rho = positivity_rho(params, 200000, rng);
    }
    rep.metrics["rho"] = rho;

    if (rho > 0.0 && rho < 1.0) {
        ArcsineParams arc(rho);
        auto cdf = [&](double t) {
            return arcsine_cdf(arc, std::clamp(t, 0.0, 1.0));
        };
        rep.add("ks_occupation_m1", ks_one_sample(frac1, cdf),
                cfg.tolerance("ks_arcsine", 0.05));
        rep.add("ks_occupation_m0", ks_one_sample(frac0, cdf),
                cfg.tolerance("ks_arcsine", 0.05));
    } else {
        rep.metrics["degenerate_rho"] = rho;
    }
    rep.add("ks_convention_difference", ks_distance(frac1, frac0),
            cfg.tolerance("ks_convention", 0.01), true,
            "m >= 1 versus m >= 0 occupation conventions");

    rep.csv_header = "replicate,fraction_m_ge1,fraction_m_ge0";
    rep.csv_rows.reserve(N);
    for (std::size_t r = 0; r < N; ++r) {
        std::ostringstream row;
        row.precision(17);
        row << r << "," << frac1[r] << "," << frac0[r];
        rep.csv_rows.push_back(row.str());
    }
    rep.write(cfg.output_dir);
    return rep;
}

ExperimentReport nonergodic_variant_check(const ExperimentConfig& cfg) {
    ExperimentReport rep;
    rep.experiment = "arcsine_variants";
    rep.seed = cfg.seed;
    rep.config_echo = cfg.to_json();

    struct Variant {
        std::int64_t factor;
        std::int64_t m0;
        const char* label;
    };
    const Variant variants[] = {{cfg.observable.factor, cfg.m0, "base"},
                                {2 * cfg.observable.factor, 0, "doubled_m0_0"},
                                {2 * cfg.observable.factor, 1, "doubled_m0_1"},
                                {cfg.observable.factor, 1, "base_m0_1"}};
    for (const auto& v : variants) {
        ExperimentConfig sub = cfg;
        sub.observable.factor = v.factor;
        sub.m0 = v.m0;
        sub.output_dir.clear();
        ExperimentReport r = arcsine_experiment(sub);
        for (const auto& c : r.checks)
            rep.add(std::string(v.label) + "." + c.name, c.value, c.tolerance,
                    true, c.note);
    }
    rep.write(cfg.output_dir);
    return rep;
}

// --- excursions -----------------------------------------------------------

ExperimentReport excursion_tail_experiment(const ExperimentConfig& cfg) {
    if (cfg.system.name != "lsv2")
        throw std::invalid_argument("excursions: system must be lsv2");
    IntermittentMap map = make_lsv2(cfg.system.p);
    ReturnStructure rs = find_Y(map);

    ExperimentReport rep;
    rep.experiment = "excursions";
    rep.seed = cfg.seed;
    rep.config_echo = cfg.to_json();

    Rng rng(sub_seed(cfg.seed, kAuxTag));
    ExcursionTailReport tails = excursion_tail_estimate(
        map, rs, std::max<std::size_t>(cfg.n, 10000), rng, cfg.cap);

    const double alpha_true = 1.0 / cfg.system.p;
    const double tol = cfg.tolerance("hill_dev", 0.05);
    rep.add("hill_side0_deviation",
            std::fabs(tails.side0.alpha_hat - alpha_true), tol);
    rep.add("hill_side1_deviation",
            std::fabs(tails.side1.alpha_hat - alpha_true), tol);
    rep.add("hill_side0_burned_deviation",
            std::fabs(tails.side0_burned.alpha_hat - alpha_true), tol);
    rep.add("hill_side1_burned_deviation",
            std::fabs(tails.side1_burned.alpha_hat - alpha_true), tol);
    rep.add("side_count_ratio_deviation", std::fabs(tails.count_ratio - 1.0),
            cfg.tolerance("ratio_dev", 0.1), true,
            "side-0 to side-1 exceedance counts at the matched threshold");
    rep.metrics["side_count_ratio"] = tails.count_ratio;
    rep.censored = tails.censored;
    rep.metrics["hill_side0"] = tails.side0.alpha_hat;
    rep.metrics["hill_side1"] = tails.side1.alpha_hat;
    rep.metrics["hill_side0_ci_low"] = tails.side0.ci_low;
    rep.metrics["hill_side0_ci_high"] = tails.side0.ci_high;
    rep.metrics["threshold"] = tails.threshold;
    rep.write(cfg.output_dir);
    return rep;
}

ExperimentReport independence_test(const ExperimentConfig& cfg) {
    if (cfg.system.name != "lsv2")
        throw std::invalid_argument("independence: system must be lsv2");
    if (!(cfg.system.p > 2.0))
        throw std::invalid_argument(
            "independence: the excursion limit needs p > 2");
    IntermittentMap map = make_lsv2(cfg.system.p);
    ReturnStructure rs = find_Y(map);

    ExperimentReport rep;
    rep.experiment = "independence";
    rep.seed = cfg.seed;
    rep.config_echo = cfg.to_json();

    const std::size_t N = cfg.replicates;
    std::vector<double> s0(N), s1(N);
    std::vector<std::size_t> censored(N, 0);
    parallel_replicates(N, cfg.workers, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t r = lo; r < hi; ++r) {
            Rng rng = Rng::for_replicate(cfg.seed, r);
            ExcursionSample sample =
                simulate_returns(map, rs, cfg.n, cfg.cap, rng);
            double sum0 = 0.0, sum1 = 0.0;
            for (std::size_t i = 0; i < sample.phi.size(); ++i)
                (sample.side[i] == 0 ? sum0 : sum1) +=
                    static_cast<double>(sample.phi[i]);
            s0[r] = sum0;
            s1[r] = sum1;
            censored[r] = sample.censored;
        }
    });
    for (auto c : censored) rep.censored += c;

    // the canonical B_n is known only up to the (uncomputed) invariant
    // density constant; all statistics below are scale-invariant, and the
    // marginal shape comparison fixes scale by matching upper quartiles
    double q0 = quantile(s0, 0.75);
    double q1 = quantile(s1, 0.75);
    std::vector<double> z0(N), z1(N);
    for (std::size_t r = 0; r < N; ++r) {
        z0[r] = s0[r] / q0;
        z1[r] = s1[r] / q1;
    }

    rep.add("dcorr_sides", rank_distance_correlation(z0, z1),
            cfg.tolerance("dcorr", 0.05));
    rep.add("joint_cdf_factorization",
            joint_cdf_factorization_error(z0, z1, {0.25, 0.5, 0.75}),
            cfg.tolerance("factorization", 0.03));

    const double alpha = 1.0 / cfg.system.p;
    StableParams one_sided(alpha, 1.0, 0.0);
    auto ref = stable_reference_pool(one_sided, N,
                                     sub_seed(cfg.seed, kRefTag), cfg.workers);
    double qr = quantile(ref, 0.75);
    for (auto& v : ref) v /= qr;
    rep.add("ks_marginal_side0", ks_distance(z0, ref),
            cfg.tolerance("ks_excursion", 0.04));
    rep.add("ks_marginal_side1", ks_distance(z1, ref),
            cfg.tolerance("ks_excursion", 0.04));
    rep.metrics["quartile_side0"] = q0;
    rep.metrics["quartile_side1"] = q1;
    rep.write(cfg.output_dir);
    return rep;
}

ExperimentReport directional_tail_check(const ExperimentConfig& cfg) {
    if (cfg.system.name != "lsv2")
        throw std::invalid_argument("directional: system must be lsv2");
    IntermittentMap map = make_lsv2(cfg.system.p);
    ReturnStructure rs = find_Y(map);

    ExperimentReport rep;
    rep.experiment = "directional";
    rep.seed = cfg.seed;
    rep.config_echo = cfg.to_json();

    Rng rng(sub_seed(cfg.seed, kAuxTag));
    ExcursionSample sample = simulate_returns(map, rs, cfg.n, cfg.cap, rng);
    rep.censored = sample.censored;

    // per-return excursion vector (phi0, phi1): one coordinate is zero, so
    // conditioned on a large norm the direction must sit on an axis
    std::vector<double> weights;
    for (double t : cfg.thresholds) {
        std::size_t c0 = 0, c1 = 0, off_axis = 0;
        for (std::size_t i = 0; i < sample.phi.size(); ++i) {
            double norm = static_cast<double>(sample.phi[i]);
            if (norm <= t) continue;
            if (sample.side[i] == 0)
                ++c0;
            else if (sample.side[i] == 1)
                ++c1;
            else
                ++off_axis;
        }
        std::size_t total = c0 + c1;
        double w0 = total > 0 ? static_cast<double>(c0) /
                                    static_cast<double>(total)
                              : 0.5;
        weights.push_back(w0);
        rep.metrics["weight0_t" + std::to_string(static_cast<long>(t))] = w0;
        rep.metrics["exceedances_t" + std::to_string(static_cast<long>(t))] =
            static_cast<double>(total);
        rep.add("off_axis_mass_t" + std::to_string(static_cast<long>(t)),
                static_cast<double>(off_axis), 0.5);
        double se = total > 0 ? binom_se(w0, total) : 1.0;
        rep.add("weight_symmetry_t" + std::to_string(static_cast<long>(t)),
                std::fabs(w0 - 0.5), 3.0 * se + 0.02, true,
                "kappa_0 = kappa_1 forces equal axis weights");
    }
    // stability of the weights across thresholds
    for (std::size_t i = 0; i + 1 < weights.size(); ++i)
        rep.add("weight_stability_" + std::to_string(i),
                std::fabs(weights[i] - weights[i + 1]),
                cfg.tolerance("weight_stability", 0.05));
    rep.write(cfg.output_dir);
    return rep;
}

// --- selftest -----------------------------------------------------------

ExperimentReport selftest(const ExperimentConfig& cfg) {
    ExperimentReport rep;
    rep.experiment = "selftest";
    rep.seed = cfg.seed;
    rep.config_echo = cfg.to_json();
    Rng rng(sub_seed(cfg.seed, kAuxTag));

    // oscillation bound, exact, over random cylinders of the dyadic map
    {
        DyadicRenewalMap dyadic;
        Observable f = make_f_alpha(0.8);
        std::size_t violations = 0;
        for (int c = 0; c < 200; ++c) {
            std::size_t rank = 1 + static_cast<std::size_t>(rng.next_u64() % 8);
            std::vector<std::int64_t> word(rank);
            for (auto& w : word) w = dyadic.sample_symbol(rng);
            auto r = oscillation_check(dyadic, f, word, 50, rng);
            violations += r.violations;
        }
        rep.add("oscillation_violations", static_cast<double>(violations), 0.5);
    }

    // affine distortion is exactly zero
    {
        DyadicRenewalMap dyadic;
        auto d = distortion_check(dyadic, 4, 200, rng);
        rep.add("dyadic_log_distortion", d.max_log_distortion, 1e-12);
        HeavyBernoulliShift shift(0.75, true);
        auto d2 = distortion_check(shift, 3, 200, rng);
        rep.add("heavy_shift_log_distortion", d2.max_log_distortion, 1e-12);
    }

    // pathwise max-increment inclusion on sampled paths
    {
        DyadicRenewalMap dyadic;
        Observable f = make_f_alpha(0.8);
        std::size_t viol = 0;
        const std::size_t n = 200;
        for (int r = 0; r < 100; ++r) {
            auto orbit = dyadic.stationary_orbit(n - 1, rng);
            std::vector<double> S(n + 1, 0.0);
            for (std::size_t k = 0; k < n; ++k)
                S[k + 1] = S[k] + f(orbit[k].x, orbit[k].symbol);
            double max_abs = 0.0, max_diff = 0.0;
            for (std::size_t k = 1; k <= n; ++k) {
                max_abs = std::max(max_abs, std::fabs(S[k]));
                max_diff = std::max(max_diff, std::fabs(S[n] - S[k]));
            }
            for (double kappa : {1.0, 5.0, 25.0, 125.0})
                if (max_diff > kappa && !(max_abs > kappa / 2.0)) ++viol;
        }
        rep.add("max_increment_inclusion_violations",
                static_cast<double>(viol), 0.5);
    }

    // disjoint excursion supports
    {
        IntermittentMap map = make_lsv2(3.0);
        ReturnStructure rs = find_Y(map);
        auto sample = simulate_returns(map, rs, 20000, cfg.cap, rng);
        rep.add("disjoint_support_violations",
                static_cast<double>(sample.disjoint_support_violations), 0.5);
        rep.add("phi_at_least_one",
                static_cast<double>(std::count_if(
                    sample.phi.begin(), sample.phi.end(),
                    [](std::int64_t v) { return v < 1; })),
                0.5);
    }

    // J1 metric axioms on random step paths
    {
        auto random_step = [&](Rng& r) {
            std::size_t jumps = r.next_u64() % 4;
            std::vector<double> times{0.0};
            double t = 0.0;
            for (std::size_t j = 0; j < jumps; ++j) {
                t += r.uniform() * (1.0 - t) * 0.8;
                if (t <= times.back() || t >= 1.0) break;
                times.push_back(t);
            }
            std::vector<double> vals(times.size());
            for (auto& v : vals) v = r.uniform(-2.0, 2.0);
            return CadlagPath::step(1.0, times, vals);
        };
        double worst_sym = 0.0, worst_tri = 0.0, worst_dom = 0.0,
               worst_self = 0.0;
        for (int t = 0; t < 300; ++t) {
            CadlagPath x = random_step(rng);
            CadlagPath y = random_step(rng);
            CadlagPath z = random_step(rng);
            double dxy = j1_distance(x, y, 1.0);
            double dyx = j1_distance(y, x, 1.0);
            double dxz = j1_distance(x, z, 1.0);
            double dzy = j1_distance(z, y, 1.0);
            worst_sym = std::max(worst_sym, std::fabs(dxy - dyx));
            worst_tri = std::max(worst_tri, dxy - (dxz + dzy));
            worst_dom = std::max(worst_dom, dxy - sup_distance(x, y, 1.0));
            worst_self = std::max(worst_self, j1_distance(x, x, 1.0));
        }
        rep.add("j1_symmetry_gap", worst_sym, 1e-12);
        rep.add("j1_triangle_gap", worst_tri, 1e-9);
        rep.add("j1_sup_domination_gap", worst_dom, 1e-12);
        rep.add("j1_self_distance", worst_self, 1e-12);
    }

    rep.write(cfg.output_dir);
    return rep;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    if (cfg.experiment == "marginal") return marginal_test(cfg);
    if (cfg.experiment == "fdd") return fdd_test(cfg);
    if (cfg.experiment == "tightness") return tightness_diagnostic(cfg);
    if (cfg.experiment == "maxineq") return maximal_inequality_check(cfg);
    if (cfg.experiment == "weighted_tail") return weighted_tail_check(cfg);
    if (cfg.experiment == "j1probe") return j1_convergence_probe(cfg);
    if (cfg.experiment == "arcsine") return arcsine_experiment(cfg);
    if (cfg.experiment == "arcsine_variants")
        return nonergodic_variant_check(cfg);
    if (cfg.experiment == "excursions") return excursion_tail_experiment(cfg);
    if (cfg.experiment == "independence") return independence_test(cfg);
    if (cfg.experiment == "directional") return directional_tail_check(cfg);
    if (cfg.experiment == "selftest") return selftest(cfg);
    throw std::invalid_argument("unknown experiment '" + cfg.experiment + "'");
}

}  // namespace stablelab
