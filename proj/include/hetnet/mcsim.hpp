#pragma once

// Monte-Carlo simulator: per-tier Poisson point counts in a guard disk,
// inverse-c.d.f. fading draws so paired model comparisons share randomness,
// counter-based per-trial substreams for thread-count-independent
// determinism, and Campbell-mean compensation of the interference from
// beyond the disk.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "model.hpp"

namespace hetnet {

struct SimConfig {
    long long trials = 200000;
    double disk_radius = 0.0;  // FixedRadius value; ignored under AutoRadius
    std::uint64_t seed = 1;
    enum class Guard { FixedRadius, AutoRadius } guard = Guard::AutoRadius;
    double edge_tolerance = 1e-3;  // AutoRadius target for the far-field fluctuation
    int threads = 0;               // 0 = hardware concurrency

    void validate() const {
        if (trials < 1) throw std::invalid_argument("SimConfig: trials must be >= 1");
        if (guard == Guard::FixedRadius && !(disk_radius > 0.0))
            throw std::invalid_argument("SimConfig: FixedRadius requires disk_radius > 0");
        if (!(edge_tolerance > 0.0))
            throw std::invalid_argument("SimConfig: edge_tolerance must be positive");
    }
};

struct MonteCarloEstimate {
    double mean = 0.0;
    double stderr_est = 0.0;
    long long trials = 0;
};

// ---- RNG: splitmix64 substream per (seed, trial index) ---------------------

class TrialRng {
  public:
    TrialRng(std::uint64_t seed, std::uint64_t trial) {
        state_ = mix(seed) ^ mix(trial + 0x9E3779B97F4A7C15ull);
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        return mix(state_);
    }

    // uniform in [0, 1)
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in (0, 1), never exactly 0 or 1
    double next_open() {
        return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
    }

    long long next_poisson(double mu) {
        if (!(mu > 0.0)) return 0;
        if (mu < 12.0) {
            double limit = std::exp(-mu), prod = 1.0;
            long long k = -1;
            do {
                prod *= next_double();
                ++k;
            } while (prod > limit);
            return k;
        }
        // Hormann's PTRS transformed rejection
        double b = 0.931 + 2.53 * std::sqrt(mu);
        double va = -0.059 + 0.02483 * b;
        double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
        double vr = 0.9277 - 3.6224 / (b - 2.0);
        double lmu = std::log(mu);
        while (true) {
            double u = next_double() - 0.5;
            double v = next_double();
            double us = 0.5 - std::abs(u);
            long long k = static_cast<long long>(std::floor((2.0 * va / us + b) * u + mu + 0.43));
            if (us >= 0.07 && v <= vr) return k;
            if (k < 0 || (us < 0.013 && v > us)) continue;
            if (std::log(v * inv_alpha / (va / (us * us) + b)) <=
                k * lmu - mu - std::lgamma(static_cast<double>(k) + 1.0))
                return k;
        }
    }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t state_ = 0;
};

// ---- point generation -------------------------------------------------------

struct TierPoints {
    std::vector<double> dist;  // distances from the probe at the origin
    std::vector<double> psi;   // fading draws
};

// N ~ Poisson(lambda pi R^2) points uniform in the disk (distance R sqrt(U))
// with independent inverse-c.d.f. fading marks.
inline TierPoints generate_tier_points(double lambda, double radius, TrialRng& rng,
                                       const FadingDistribution& fading) {
    TierPoints out;
    if (!(lambda >= 0.0) || !(radius > 0.0))
        throw std::invalid_argument("generate_tier_points: need lambda >= 0 and radius > 0");
    long long n = rng.next_poisson(lambda * M_PI * radius * radius);
    out.dist.reserve(n);
    out.psi.reserve(n);
    for (long long i = 0; i < n; ++i) {
        out.dist.push_back(radius * std::sqrt(rng.next_double()));
        out.psi.push_back(fading_quantile(fading, rng.next_open()));
    }
    return out;
}

// ---- guard radius and far-field compensation --------------------------------

namespace detail {

inline double far_mean_tier(const TierConfig& t, double radius) {
    // Campbell mean of sum P psi r^{-e} over r > radius
    return 2.0 * M_PI * t.density * t.power * fading_mean(t.fading) *
           std::pow(radius, 2.0 - t.pathloss_exp) / (t.pathloss_exp - 2.0);
}

inline double far_variance_tier(const TierConfig& t, double radius) {
    return 2.0 * M_PI * t.density * t.power * t.power * fading_second_moment(t.fading) *
           std::pow(radius, 2.0 - 2.0 * t.pathloss_exp) / (2.0 * t.pathloss_exp - 2.0);
}

}  // namespace detail

// Doubles the disk radius until the standard deviation of the (mean-
// compensated) far-field interference drops below edge_tolerance times the
// typical interference-plus-noise level.
inline double auto_disk_radius(const HetNetScenario& sc, double edge_tolerance) {
    double r0 = 1.0;
    double i_ref = sc.noise;
    auto visit = [&](const TierConfig& t) {
        if (t.density <= 0.0) return;
        double r_med = std::sqrt(std::log(2.0) / (M_PI * t.density));
        r0 = std::max(r0, 2.0 * r_med);
        i_ref += detail::far_mean_tier(t, r_med);
    };
    for (const auto& t : sc.open_tiers) visit(t);
    for (const auto& t : sc.closed_tiers) visit(t);
    if (i_ref == 0.0) return r0;
    double radius = r0;
    for (int i = 0; i < 40; ++i) {
        double var = 0.0;
        for (const auto& t : sc.open_tiers)
            if (t.density > 0.0) var += detail::far_variance_tier(t, radius);
        for (const auto& t : sc.closed_tiers)
            if (t.density > 0.0) var += detail::far_variance_tier(t, radius);
        if (std::sqrt(var) <= edge_tolerance * i_ref) break;
        radius *= 2.0;
    }
    return radius;
}

inline double resolve_disk_radius(const HetNetScenario& sc, const SimConfig& cfg) {
    return cfg.guard == SimConfig::Guard::AutoRadius ? auto_disk_radius(sc, cfg.edge_tolerance)
                                                     : cfg.disk_radius;
}

// ---- snapshot evaluation -----------------------------------------------------

struct ModelOutcome {
    int serving_tier = -1;      // -1: no candidate
    double serving_sinr = 0.0;
    bool covered = false;
};

struct SnapshotResult {
    ModelOutcome maxsinr, nearest, mirp, mbrp;
    double io = 0.0, ic = 0.0;  // realized sums including the far-field mean
};

namespace detail {

constexpr double kSinrCap = 1e12;

inline double sinr_of(double p, double total) {
    double denom = total - p;
    if (denom <= p / kSinrCap) return kSinrCap;
    return p / denom;
}

}  // namespace detail

// Evaluates every association rule on one realized set of points. The
// coverage tests use the signal-versus-total-power comparison
// gamma_k p > Io + Ic + eta rather than explicit SINR ratios.
inline SnapshotResult evaluate_snapshot(const HetNetScenario& sc,
                                        const std::vector<TierPoints>& open_pts,
                                        const std::vector<TierPoints>& closed_pts,
                                        const std::vector<double>* mbrp_biases = nullptr,
                                        double far_mean_open = 0.0,
                                        double far_mean_closed = 0.0) {
    const std::size_t K = sc.open_tiers.size();
    SnapshotResult out;
    out.io = far_mean_open;
    out.ic = far_mean_closed;

    std::vector<double> max_pow(K, 0.0), near_pow(K, 0.0), near_dist(K, -1.0);
    for (std::size_t k = 0; k < K; ++k) {
        const auto& t = sc.open_tiers[k];
        const auto& pts = open_pts[k];
        double best = 0.0, nd = -1.0, np = 0.0;
        for (std::size_t i = 0; i < pts.dist.size(); ++i) {
            double p = t.power * pts.psi[i] * std::pow(pts.dist[i], -t.pathloss_exp);
            out.io += p;
            if (p > best) best = p;
            if (nd < 0.0 || pts.dist[i] < nd) {
                nd = pts.dist[i];
                np = p;
            }
        }
        max_pow[k] = best;
        near_pow[k] = np;
        near_dist[k] = nd;
    }
    for (std::size_t l = 0; l < sc.closed_tiers.size(); ++l) {
        const auto& t = sc.closed_tiers[l];
        const auto& pts = closed_pts[l];
        for (std::size_t i = 0; i < pts.dist.size(); ++i)
            out.ic += t.power * pts.psi[i] * std::pow(pts.dist[i], -t.pathloss_exp);
    }
    double total = out.io + out.ic + sc.noise;

    auto decide = [&](const std::vector<double>& cand, int tier) -> ModelOutcome {
        ModelOutcome m;
        if (tier < 0) return m;
        double p = cand[tier];
        double gamma = gamma_factor(sc.open_tiers[tier].sinr_threshold);
        m.serving_tier = tier;
        m.serving_sinr = detail::sinr_of(p, total);
        m.covered = gamma * p > total;
        return m;
    };

    // max-SINR / MIRP: over all points; serving by max gamma p resp. max p
    {
        int best_g = -1, best_p = -1;
        double vg = 0.0, vp = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            if (max_pow[k] <= 0.0) continue;
            double g = gamma_factor(sc.open_tiers[k].sinr_threshold) * max_pow[k];
            if (best_g < 0 || g > vg) {
                vg = g;
                best_g = static_cast<int>(k);
            }
            if (best_p < 0 || max_pow[k] > vp) {
                vp = max_pow[k];
                best_p = static_cast<int>(k);
            }
        }
        out.maxsinr = decide(max_pow, best_g);
        out.mirp = decide(max_pow, best_p);
    }
    // nearest-BS: per-tier nearest candidates, serving by max gamma p
    {
        int best = -1;
        double vg = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            if (near_dist[k] < 0.0) continue;
            double g = gamma_factor(sc.open_tiers[k].sinr_threshold) * near_pow[k];
            if (best < 0 || g > vg) {
                vg = g;
                best = static_cast<int>(k);
            }
        }
        out.nearest = decide(near_pow, best);
    }
    // MBRP: biased mean received power over per-tier nearest candidates
    if (mbrp_biases) {
        int best = -1;
        double vb = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            if (near_dist[k] < 0.0) continue;
            const auto& t = sc.open_tiers[k];
            double w = t.power * fading_mean(t.fading) * (*mbrp_biases)[k] *
                       std::pow(near_dist[k], -t.pathloss_exp);
            if (best < 0 || w > vb) {
                vb = w;
                best = static_cast<int>(k);
            }
        }
        out.mbrp = decide(near_pow, best);
    }
    return out;
}

// ---- estimators ---------------------------------------------------------------

namespace detail {

struct BatchStats {
    long long trials = 0;
    long long covered_maxsinr = 0, covered_nearest = 0, covered_mirp = 0, covered_mbrp = 0;
    long long nest_near_viol = 0;   // nearest covered but max-SINR not
    long long nest_mbrp_viol = 0;   // MBRP covered but nearest not
    std::vector<long long> tier_cov_maxsinr, tier_cov_nearest, tier_cov_mirp, tier_cov_mbrp;
    std::vector<long long> mbrp_serving;  // serving tier counts, coverage aside
    double rate_sum_maxsinr = 0, rate_sq_maxsinr = 0;
    double rate_sum_nearest = 0, rate_sq_nearest = 0;
    double rate_sum_mirp = 0, rate_sq_mirp = 0;
    double rate_sum_mbrp = 0, rate_sq_mbrp = 0;

    explicit BatchStats(std::size_t k = 0)
        : tier_cov_maxsinr(k, 0),
          tier_cov_nearest(k, 0),
          tier_cov_mirp(k, 0),
          tier_cov_mbrp(k, 0),
          mbrp_serving(k, 0) {}

    void add(const SnapshotResult& s) {
        ++trials;
        auto tally = [](const ModelOutcome& m, long long& cov, std::vector<long long>& tiers,
                        double& rs, double& rq) {
            if (!m.covered) return;
            ++cov;
            tiers[m.serving_tier] += 1;
            double r = std::log2(1.0 + m.serving_sinr);
            rs += r;
            rq += r * r;
        };
        tally(s.maxsinr, covered_maxsinr, tier_cov_maxsinr, rate_sum_maxsinr, rate_sq_maxsinr);
        tally(s.nearest, covered_nearest, tier_cov_nearest, rate_sum_nearest, rate_sq_nearest);
        tally(s.mirp, covered_mirp, tier_cov_mirp, rate_sum_mirp, rate_sq_mirp);
        tally(s.mbrp, covered_mbrp, tier_cov_mbrp, rate_sum_mbrp, rate_sq_mbrp);
        if (s.nearest.covered && !s.maxsinr.covered) ++nest_near_viol;
        if (s.mbrp.covered && !s.nearest.covered) ++nest_mbrp_viol;
        if (s.mbrp.serving_tier >= 0) mbrp_serving[s.mbrp.serving_tier] += 1;
    }

    void merge(const BatchStats& o) {
        trials += o.trials;
        covered_maxsinr += o.covered_maxsinr;
        covered_nearest += o.covered_nearest;
        covered_mirp += o.covered_mirp;
        covered_mbrp += o.covered_mbrp;
        nest_near_viol += o.nest_near_viol;
        nest_mbrp_viol += o.nest_mbrp_viol;
        for (std::size_t i = 0; i < tier_cov_maxsinr.size(); ++i) {
            tier_cov_maxsinr[i] += o.tier_cov_maxsinr[i];
            tier_cov_nearest[i] += o.tier_cov_nearest[i];
            tier_cov_mirp[i] += o.tier_cov_mirp[i];
            tier_cov_mbrp[i] += o.tier_cov_mbrp[i];
            mbrp_serving[i] += o.mbrp_serving[i];
        }
        rate_sum_maxsinr += o.rate_sum_maxsinr;
        rate_sq_maxsinr += o.rate_sq_maxsinr;
        rate_sum_nearest += o.rate_sum_nearest;
        rate_sq_nearest += o.rate_sq_nearest;
        rate_sum_mirp += o.rate_sum_mirp;
        rate_sq_mirp += o.rate_sq_mirp;
        rate_sum_mbrp += o.rate_sum_mbrp;
        rate_sq_mbrp += o.rate_sq_mbrp;
    }
};

// Deterministic chunked parallel run: chunk results are merged in index
// order regardless of which worker produced them.
template <typename MakeStats, typename Work>
auto run_chunked(long long trials, int threads, MakeStats&& make, Work&& work) {
    using Stats = decltype(make());
    const long long chunk = 4096;
    const long long n_chunks = (trials + chunk - 1) / chunk;
    std::vector<Stats> results(static_cast<std::size_t>(n_chunks), make());
    int nthreads = threads > 0 ? threads
                               : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    nthreads = static_cast<int>(std::min<long long>(nthreads, n_chunks));
    std::atomic<long long> next{0};
    auto worker = [&]() {
        while (true) {
            long long c = next.fetch_add(1);
            if (c >= n_chunks) break;
            long long lo = c * chunk, hi = std::min(trials, lo + chunk);
            Stats st = make();
            for (long long i = lo; i < hi; ++i) work(i, st);
            results[static_cast<std::size_t>(c)] = std::move(st);
        }
    };
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    Stats total = make();
    for (auto& r : results) total.merge(r);
    return total;
}

inline SnapshotResult simulate_one(const HetNetScenario& sc, double radius,
                                   const std::vector<double>* biases, double far_open,
                                   double far_closed, std::uint64_t seed, long long trial) {
    TrialRng rng(seed, static_cast<std::uint64_t>(trial));
    std::vector<TierPoints> open_pts, closed_pts;
    open_pts.reserve(sc.open_tiers.size());
    for (const auto& t : sc.open_tiers)
        open_pts.push_back(generate_tier_points(t.density, radius, rng, t.fading));
    closed_pts.reserve(sc.closed_tiers.size());
    for (const auto& t : sc.closed_tiers)
        closed_pts.push_back(generate_tier_points(t.density, radius, rng, t.fading));
    return evaluate_snapshot(sc, open_pts, closed_pts, biases, far_open, far_closed);
}

}  // namespace detail

// Paired-snapshot batch over every association rule; the workhorse behind
// the public estimators and the ordering tests.
inline detail::BatchStats run_paired_batch(const HetNetScenario& sc,
                                           const std::vector<double>& mbrp_biases,
                                           const SimConfig& cfg) {
    require_valid(sc);
    cfg.validate();
    if (mbrp_biases.size() != sc.open_tiers.size())
        throw std::invalid_argument("run_paired_batch: need one bias per open tier");
    double radius = resolve_disk_radius(sc, cfg);
    double far_open = 0.0, far_closed = 0.0;
    for (const auto& t : sc.open_tiers)
        if (t.density > 0.0) far_open += detail::far_mean_tier(t, radius);
    for (const auto& t : sc.closed_tiers)
        if (t.density > 0.0) far_closed += detail::far_mean_tier(t, radius);
    const auto* biases = &mbrp_biases;
    return detail::run_chunked(
        cfg.trials, cfg.threads, [&] { return detail::BatchStats(sc.open_tiers.size()); },
        [&](long long trial, detail::BatchStats& st) {
            st.add(detail::simulate_one(sc, radius, biases, far_open, far_closed, cfg.seed, trial));
        });
}

namespace detail {

inline void model_slices(const BatchStats& st, const ConnectivityModel& model, long long& covered,
                         const std::vector<long long>** tiers, double& rsum, double& rsq) {
    switch (model.kind) {
        case ConnectivityModel::Kind::MaxSinr:
            covered = st.covered_maxsinr;
            *tiers = &st.tier_cov_maxsinr;
            rsum = st.rate_sum_maxsinr;
            rsq = st.rate_sq_maxsinr;
            break;
        case ConnectivityModel::Kind::NearestBs:
            covered = st.covered_nearest;
            *tiers = &st.tier_cov_nearest;
            rsum = st.rate_sum_nearest;
            rsq = st.rate_sq_nearest;
            break;
        case ConnectivityModel::Kind::Mirp:
            covered = st.covered_mirp;
            *tiers = &st.tier_cov_mirp;
            rsum = st.rate_sum_mirp;
            rsq = st.rate_sq_mirp;
            break;
        case ConnectivityModel::Kind::Mbrp:
            covered = st.covered_mbrp;
            *tiers = &st.tier_cov_mbrp;
            rsum = st.rate_sum_mbrp;
            rsq = st.rate_sq_mbrp;
            break;
    }
}

inline std::vector<double> default_biases(const HetNetScenario& sc,
                                          const ConnectivityModel& model) {
    if (model.kind == ConnectivityModel::Kind::Mbrp) {
        if (model.biases.size() != sc.open_tiers.size())
            throw std::invalid_argument("Mbrp model: need one bias per open tier");
        return model.biases;
    }
    return std::vector<double>(sc.open_tiers.size(), 1.0);
}

}  // namespace detail

// Bernoulli coverage estimate with per-tier served-and-covered shares and
// the conditional rate when at least one covered snapshot exists.
inline CoverageReport estimate_coverage(const HetNetScenario& sc, const ConnectivityModel& model,
                                        const SimConfig& cfg) {
    auto st = run_paired_batch(sc, detail::default_biases(sc, model), cfg);
    long long covered = 0;
    const std::vector<long long>* tiers = nullptr;
    double rsum = 0, rsq = 0;
    detail::model_slices(st, model, covered, &tiers, rsum, rsq);

    CoverageReport rep;
    rep.method = CoverageMethod::MonteCarlo;
    double n = static_cast<double>(st.trials);
    rep.probability = covered / n;
    rep.stderr_est = std::sqrt(std::max(0.0, rep.probability * (1.0 - rep.probability) / n));
    for (long long c : *tiers) rep.tier_serving_prob.push_back(c / n);
    if (covered > 0) rep.conditional_rate = rsum / covered;
    return rep;
}

// Mean of log2(1 + SINR) over covered snapshots; empty when nothing was
// covered.
inline std::optional<MonteCarloEstimate> estimate_conditional_rate(const HetNetScenario& sc,
                                                                   const ConnectivityModel& model,
                                                                   const SimConfig& cfg) {
    auto st = run_paired_batch(sc, detail::default_biases(sc, model), cfg);
    long long covered = 0;
    const std::vector<long long>* tiers = nullptr;
    double rsum = 0, rsq = 0;
    detail::model_slices(st, model, covered, &tiers, rsum, rsq);
    if (covered == 0) return std::nullopt;
    MonteCarloEstimate est;
    est.trials = covered;
    est.mean = rsum / covered;
    double var = std::max(0.0, rsq / covered - est.mean * est.mean);
    est.stderr_est = std::sqrt(var / covered);
    return est;
}

// Empirical mean of e^{-s Ic} for validating the closed-tier interference
// transform; only the closed tiers are simulated.
inline MonteCarloEstimate estimate_interference_transform(const HetNetScenario& sc, double s,
                                                          const SimConfig& cfg) {
    require_valid(sc);
    cfg.validate();
    if (!(s > 0.0))
        throw std::domain_error("estimate_interference_transform: s must be positive");
    if (sc.closed_tiers.empty()) return {1.0, 0.0, cfg.trials};
    double radius = resolve_disk_radius(sc, cfg);
    double far_closed = 0.0;
    for (const auto& t : sc.closed_tiers)
        if (t.density > 0.0) far_closed += detail::far_mean_tier(t, radius);

    struct Acc {
        double sum = 0.0, sq = 0.0;
        long long trials = 0;
        void merge(const Acc& o) {
            sum += o.sum;
            sq += o.sq;
            trials += o.trials;
        }
    };
    auto st = detail::run_chunked(
        cfg.trials, cfg.threads, [] { return Acc{}; },
        [&](long long trial, Acc& acc) {
            TrialRng rng(cfg.seed, static_cast<std::uint64_t>(trial));
            double ic = far_closed;
            for (const auto& t : sc.closed_tiers) {
                auto pts = generate_tier_points(t.density, radius, rng, t.fading);
                for (std::size_t i = 0; i < pts.dist.size(); ++i)
                    ic += t.power * pts.psi[i] * std::pow(pts.dist[i], -t.pathloss_exp);
            }
            double x = std::exp(-s * ic);
            acc.sum += x;
            acc.sq += x * x;
            ++acc.trials;
        });
    MonteCarloEstimate est;
    est.trials = st.trials;
    est.mean = st.sum / st.trials;
    double var = std::max(0.0, st.sq / st.trials - est.mean * est.mean);
    est.stderr_est = std::sqrt(var / st.trials);
    return est;
}

}  // namespace hetnet
