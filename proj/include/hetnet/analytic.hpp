#pragma once

// Semi-analytical coverage computations: the closed-tier interference
// transform, the joint transforms under max-power / nearest-point
// conditioning with their log-derivatives, the general double-integral
// coverage expressions, the max-instantaneous-received-power (MIRP) paths,
// the beta >= 1 single-integral form, and the biased-association (MBRP)
// exponential-fading forms with serving-tier statistics.

#include <algorithm>
#include <cmath>
#include <complex>
#include <atomic>
#include <functional>
#include <map>
#include <mutex>
#include <thread>
#include <stdexcept>
#include <vector>

#include "equivalence.hpp"
#include "model.hpp"
#include "quadrature.hpp"
#include "specfun.hpp"

namespace hetnet {

struct NumericsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Controls for the oscillatory and radial quadratures. omega_points seeds the
// panel density of the frequency integrals; omega_max caps their range.
struct QuadratureSpec {
    double omega_max = 4.0e6;
    int omega_points = 128;
    double radial_rel_tol = 1e-6;
    int max_subdivisions = 4000;

    void validate() const {
        if (!(omega_max > 0.0))
            throw std::invalid_argument("QuadratureSpec: omega_max must be positive");
        if (omega_points < 64)
            throw std::invalid_argument("QuadratureSpec: omega_points must be >= 64");
        if (!(radial_rel_tol > 0.0 && radial_rel_tol <= 1e-2))
            throw std::invalid_argument("QuadratureSpec: radial_rel_tol must lie in (0, 1e-2]");
        if (max_subdivisions < 16)
            throw std::invalid_argument("QuadratureSpec: max_subdivisions too small");
    }
};

struct LaplaceJointVal {
    cplx value{};
    cplx s{};
    double u = 0.0;
};

namespace detail {

// (sP)^a [Gamma(1-a) + a Gamma(-a, w)], the per-tier factor of the joint
// transform. For small |w| the bracket cancels to w^{-a} 1F1(-a;1-a;-w), so
// the caller passes ratio = sP/w (a positive real multiple known exactly,
// finite even at w = 0).
inline cplx scaled_tail_bracket(double a, cplx sP, cplx w, cplx ratio) {
    if (std::abs(w) <= 20.0) {
        return std::pow(ratio, a) * hyp1f1(-a, 1.0 - a, -w);
    }
    return std::pow(sP, a) * (gamma_fn(1.0 - a) + a * gamma_upper_inc(-a, w));
}

// (e^{j w c1} - e^{j w c2}) / (2 pi j w); finite everywhere.
inline cplx window_kernel(double w, double c1, double c2) {
    double half = 0.5 * (c1 - c2);
    return std::exp(cplx(0.0, w * 0.5 * (c1 + c2))) * (sinc_fn(w * half) * half / M_PI);
}

struct TierPow {
    double a = 0.5;      // 2 / pathloss_exp
    double eps = 4.0;    // pathloss_exp
    double dbar = 0.0;   // lambda * pi * P^a * E[Psi^a]
    double beta = 1.0;   // open tiers only
    double gamma = 2.0;  // 1 + 1/beta
    double power = 1.0;
    double lambda = 0.0;
    double moment = 1.0; // E[Psi^a]
};

inline std::vector<TierPow> open_pows(const HetNetScenario& sc) {
    std::vector<TierPow> v;
    for (const auto& t : sc.open_tiers) {
        TierPow p;
        p.a = 2.0 / t.pathloss_exp;
        p.eps = t.pathloss_exp;
        p.moment = fading_moment(t.fading, p.a);
        p.dbar = t.density * M_PI * std::pow(t.power, p.a) * p.moment;
        p.beta = t.sinr_threshold;
        p.gamma = gamma_factor(t.sinr_threshold);
        p.power = t.power;
        p.lambda = t.density;
        v.push_back(p);
    }
    return v;
}

inline std::vector<TierPow> closed_pows(const HetNetScenario& sc) {
    std::vector<TierPow> v;
    for (const auto& t : sc.closed_tiers) {
        TierPow p;
        p.a = 2.0 / t.pathloss_exp;
        p.eps = t.pathloss_exp;
        p.moment = fading_moment(t.fading, p.a);
        p.dbar = t.density * M_PI * std::pow(t.power, p.a) * p.moment;
        p.power = t.power;
        p.lambda = t.density;
        v.push_back(p);
    }
    return v;
}

// Gauss-Legendre nodes/weights on (0,1); cached per order.
inline const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre_01(int n) {
    static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<double> x(n), w(n);
    for (int i = 0; i < n; ++i) {
        double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double p0 = 0.0, dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            p0 = 1.0;
            double p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * t * p1 - j * p2) / (j + 1.0);
            }
            dp = n * (t * p0 - p1) / (t * t - 1.0);
            double dt = p0 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        x[i] = 0.5 * (1.0 - t);
        w[i] = 1.0 / ((1.0 - t * t) * dp * dp);
    }
    auto pos = cache.emplace(n, std::make_pair(std::move(x), std::move(w))).first;
    return pos->second;
}

struct FadingNodes {
    std::vector<double> psi, w;
};

inline FadingNodes fading_nodes(const FadingDistribution& dist, int n) {
    FadingNodes out;
    if (dist.kind == FadingKind::Constant) {
        out.psi = {dist.param};
        out.w = {1.0};
        return out;
    }
    const auto& [x, w] = gauss_legendre_01(n);
    out.psi.resize(x.size());
    out.w = w;
    for (std::size_t i = 0; i < x.size(); ++i) out.psi[i] = fading_quantile(dist, x[i]);
    return out;
}

// ---- half-line oscillatory integrator -----------------------------------
//
// Integrates f over [0, inf) where f reports both its value (already the
// 2 Re[...] reduction of a conjugate-symmetric integrand) and the exponent
// env(w) = -log of its decaying envelope. Panels are sized against `freq`;
// blocks grow geometrically until the envelope-based tail bound clears the
// tolerance or omega_max is hit.

struct EnvVal {
    double value = 0.0;
    double env = 0.0;
};

struct HalfLineOut {
    double value = 0.0;
    double error = 0.0;
    double omega_end = 0.0;
    bool capped = false;
};

template <typename F>
HalfLineOut integrate_halfline(F&& f, double freq, double a_min, double abs_tol,
                               const QuadratureSpec& q, double panels_per_period = 1.3) {
    HalfLineOut out;
    double env0 = f(0.0).env;
    double period = 2.0 * M_PI / std::max(freq, 1e-12);
    double lo = 0.0, hi = std::min(q.omega_max, std::max(8.0 * period, 1.0));
    auto val_only = [&](double w) { return f(w).value; };
    while (true) {
        int init = std::max(4, static_cast<int>((hi - lo) / period * panels_per_period) + 1);
        init = std::min(init, 600000);
        auto blk = quad::adaptive<double>(val_only, lo, hi, abs_tol * 0.15, 0.0,
                                          q.max_subdivisions, init);
        out.value += blk.value;
        out.error += blk.error;
        double env_end = f(hi).env;
        double grow = std::max(env_end - env0, 1.0);
        double tail = std::exp(-env_end) / (M_PI * a_min * grow);
        out.omega_end = hi;
        if (tail <= 0.25 * abs_tol) {
            out.error += tail;
            return out;
        }
        if (hi >= q.omega_max) {
            out.error += tail;
            out.capped = true;
            return out;
        }
        lo = hi;
        hi = std::min(q.omega_max, 2.0 * hi);
    }
}

// Composite GK15 with explicit node weights so side errors reported by the
// integrand (inner quadratures) are accumulated with the right measure.
// Doubles the panel count until the value stabilizes. Panels evaluate on a
// small thread pool; accumulation stays in panel order, so results do not
// depend on the worker count.
struct WeightedCompositeOut {
    double value = 0.0;
    double delta = 0.0;
    double side_error = 0.0;
};

template <typename F>
WeightedCompositeOut composite_weighted(F&& f, double a, double b, int panels0,
                                        int max_doublings, double goal) {
    WeightedCompositeOut out;
    double prev = 0.0;
    bool have_prev = false;
    int panels = std::max(panels0, 2);
    for (int pass = 0;; ++pass) {
        std::vector<std::pair<double, double>> partial(panels);
        double h = (b - a) / panels;
        auto run_panel = [&](int p) {
            double c = a + (p + 0.5) * h;
            double hh = 0.5 * h;
            double tot = 0.0, side = 0.0;
            for (int i = 0; i < 8; ++i) {
                double wt = quad::kGK15WeightsK[i] * hh;
                if (i == 7) {
                    auto [v, e] = f(c);
                    tot += wt * v;
                    side += wt * e;
                } else {
                    double x = hh * quad::kGK15Nodes[i];
                    auto [v1, e1] = f(c - x);
                    auto [v2, e2] = f(c + x);
                    tot += wt * (v1 + v2);
                    side += wt * (e1 + e2);
                }
            }
            partial[p] = {tot, side};
        };
        unsigned nthreads =
            std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()), panels);
        if (nthreads <= 1) {
            for (int p = 0; p < panels; ++p) run_panel(p);
        } else {
            std::atomic<int> next{0};
            std::exception_ptr eptr;
            std::mutex emu;
            auto worker = [&]() {
                while (true) {
                    int p = next.fetch_add(1);
                    if (p >= panels) break;
                    try {
                        run_panel(p);
                    } catch (...) {
                        std::lock_guard<std::mutex> lk(emu);
                        if (!eptr) eptr = std::current_exception();
                        break;
                    }
                }
            };
            std::vector<std::thread> pool;
            for (unsigned i = 0; i < nthreads; ++i) pool.emplace_back(worker);
            for (auto& t : pool) t.join();
            if (eptr) std::rethrow_exception(eptr);
        }
        double total = 0.0, side = 0.0;
        for (const auto& [v, e] : partial) {
            total += v;
            side += e;
        }
        if (have_prev) out.delta = std::abs(total - prev);
        out.value = total;
        out.side_error = side;
        if (have_prev && out.delta <= goal) break;
        if (pass >= max_doublings) break;
        prev = total;
        have_prev = true;
        panels *= 2;
    }
    return out;
}

// Error-driven refinement variant: the integrand reports (value, side error);
// panel GK errors drive the splitting while side errors accumulate with the
// node weights. Initial panels run on the thread pool; splits are few and
// sequential. Ties in the split order break on the interval start, so the
// refinement path is deterministic.
struct AdaptiveWeightedOut {
    double value = 0.0;
    double error = 0.0;  // GK estimate
    double side = 0.0;   // accumulated integrand-reported error
};

template <typename F>
AdaptiveWeightedOut adaptive_weighted(F&& f, double a, double b, double goal_abs,
                                      int init_panels, int max_splits) {
    struct Panel {
        double a, b, val, err, side;
    };
    auto eval_panel = [&](double x0, double x1) -> Panel {
        double c = 0.5 * (x0 + x1), hh = 0.5 * (x1 - x0);
        double kv = 0.0, gv = 0.0, side = 0.0;
        for (int i = 0; i < 8; ++i) {
            if (i == 7) {
                auto [v, e] = f(c);
                kv += quad::kGK15WeightsK[7] * v;
                gv += quad::kGK15WeightsG[3] * v;
                side += quad::kGK15WeightsK[7] * e;
            } else {
                double x = hh * quad::kGK15Nodes[i];
                auto [v1, e1] = f(c - x);
                auto [v2, e2] = f(c + x);
                kv += quad::kGK15WeightsK[i] * (v1 + v2);
                side += quad::kGK15WeightsK[i] * (e1 + e2);
                if (i % 2 == 1) gv += quad::kGK15WeightsG[i / 2] * (v1 + v2);
            }
        }
        return {x0, x1, kv * hh, std::abs((kv - gv) * hh), side * hh};
    };

    init_panels = std::max(init_panels, 2);
    std::vector<Panel> panels(init_panels);
    {
        std::atomic<int> next{0};
        std::exception_ptr eptr;
        std::mutex emu;
        auto worker = [&]() {
            while (true) {
                int p = next.fetch_add(1);
                if (p >= init_panels) break;
                try {
                    panels[p] = eval_panel(a + (b - a) * p / init_panels,
                                           a + (b - a) * (p + 1) / init_panels);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(emu);
                    if (!eptr) eptr = std::current_exception();
                    break;
                }
            }
        };
        unsigned nthreads =
            std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()), init_panels);
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
        if (eptr) std::rethrow_exception(eptr);
    }
    auto cmp = [](const Panel& x, const Panel& y) {
        return x.err < y.err || (x.err == y.err && x.a > y.a);
    };
    std::priority_queue<Panel, std::vector<Panel>, decltype(cmp)> heap(cmp);
    double total = 0.0, err = 0.0, side = 0.0;
    for (const auto& p : panels) {
        total += p.val;
        err += p.err;
        side += p.side;
        heap.push(p);
    }
    for (int s = 0; s < max_splits && err > goal_abs; ++s) {
        Panel top = heap.top();
        double mid = 0.5 * (top.a + top.b);
        if (mid <= top.a || mid >= top.b) break;
        heap.pop();
        Panel l = eval_panel(top.a, mid), r = eval_panel(mid, top.b);
        total += l.val + r.val - top.val;
        err += l.err + r.err - top.err;
        side += l.side + r.side - top.side;
        heap.push(l);
        heap.push(r);
    }
    return {total, err, side};
}

inline double clamp_probability(double p, double allowance, const char* what) {
    if (p < -allowance || p > 1.0 + allowance)
        throw NumericsError(std::string(what) + ": result " + std::to_string(p) +
                            " outside [0,1] beyond the error allowance");
    return std::min(1.0, std::max(0.0, p));
}

}  // namespace detail

// Laplace transform of the closed-tier interference,
// exp(-sum_l lambda_l pi (s P_l)^{2/e_l} E[Psi^{2/e_l}] Gamma(1 - 2/e_l)).
inline cplx laplace_closed_interference(const HetNetScenario& sc, cplx s) {
    require_valid(sc);
    if (s == cplx(0.0, 0.0)) return 1.0;
    cplx expo = 0.0;
    for (const auto& t : detail::closed_pows(sc))
        expo += t.dbar * gamma_fn(1.0 - t.a) * std::pow(s, t.a);
    return std::exp(-expo);
}

// Joint transform E[e^{-s(Io+Ic+eta)} 1(max_k gamma_k M_k <= u)] with M_k the
// per-tier maximum received power.
inline cplx laplace_joint_maxsinr(const HetNetScenario& sc, cplx s, double u) {
    require_valid(sc);
    if (!(u > 0.0)) throw std::domain_error("laplace_joint_maxsinr: u must be positive");
    cplx expo = s * sc.noise;
    for (const auto& t : detail::closed_pows(sc)) {
        if (t.dbar == 0.0) continue;
        expo += t.dbar * gamma_fn(1.0 - t.a) * std::pow(s, t.a);
    }
    for (const auto& t : detail::open_pows(sc)) {
        if (t.dbar == 0.0) continue;
        if (s == cplx(0.0, 0.0)) {
            expo += t.dbar / std::pow(t.power, t.a) * std::pow(t.gamma * t.power / u, t.a);
        } else {
            expo += t.dbar / std::pow(t.power, t.a) *
                    detail::scaled_tail_bracket(t.a, s * t.power, s * (u / t.gamma),
                                                t.power * t.gamma / u);
        }
    }
    return std::exp(-expo);
}

// d/du log E[... 1(max gamma_k M_k <= u)]: sum of per-tier hazard terms.
inline cplx dlog_laplace_maxsinr(const HetNetScenario& sc, cplx s, double u) {
    require_valid(sc);
    if (!(u > 0.0)) throw std::domain_error("dlog_laplace_maxsinr: u must be positive");
    cplx total = 0.0;
    for (const auto& t : detail::open_pows(sc)) {
        if (t.dbar == 0.0) continue;
        double coef = t.lambda * (2.0 * M_PI / t.eps) * std::pow(t.gamma * t.power, t.a) * t.moment;
        total += coef * std::pow(u, -1.0 - t.a) * std::exp(-s * (u / t.gamma));
    }
    return total;
}

// ---- nearest-point joint transform ----------------------------------------

namespace detail {

// Per-tier factor F_k(s,u) = E[e^{-s (tier-k power sum)} 1(gamma N_k <= u)]
// and its u-derivative. Two routes: a closed-form fading integral for
// exponential laws, and quantile-node quadrature otherwise.

struct NearestFactor {
    cplx value{};  // F_k
    cplx du{};     // dF_k/du
};

// value/derivative pair so one adaptive pass serves both integrals
struct CplxPair {
    cplx v{}, d{};
    CplxPair& operator+=(const CplxPair& o) {
        v += o.v;
        d += o.d;
        return *this;
    }
    friend CplxPair operator+(CplxPair a, const CplxPair& b) { return a += b; }
    friend CplxPair operator-(CplxPair a, const CplxPair& b) {
        a.v -= b.v;
        a.d -= b.d;
        return a;
    }
    friend CplxPair operator*(double w, CplxPair a) {
        a.v *= w;
        a.d *= w;
        return a;
    }
    friend CplxPair operator*(CplxPair a, double w) { return w * a; }
};

inline double abs(const CplxPair& p) { return std::abs(p.v) + std::abs(p.d); }

// Exponential fading: conditioning on the nearest distance R gives
//   psi-part  (1 - e^{-m} e^{-s u/gamma}) / (1 + c),  c = s P R^{-e},
//   m = u R^e / (gamma P), and the beyond-R interference exponent
//   T = lambda pi (sP)^a [1/sinc(2 pi/e) - x 2F1(1,a;1+a;-x^{e/2})],
//   x = R^2 (sP)^{-a}. The u-derivative collapses to a boundary term with an
//   R-independent phase.
inline NearestFactor nearest_factor_exponential(double lambda, double power_eff, double eps,
                                                double gamma, cplx s, double u,
                                                const QuadratureSpec& q, double rel_tol,
                                                double abs_tol) {
    double a = 2.0 / eps;
    const bool s_zero = (s == cplx(0.0, 0.0));
    double sinc_inv = 1.0 / sinc_fn(2.0 * M_PI / eps);
    cplx spa = s_zero ? cplx(0.0, 0.0) : std::pow(s * power_eff, a);
    auto tail_T = [&](double r2) -> cplx {
        if (s_zero) return cplx(0.0, 0.0);
        cplx z = -std::pow(r2, eps / 2.0) / (s * power_eff);
        // x 2F1 written with the spa factor folded to stay finite as s -> 0
        return lambda * M_PI * (spa * sinc_inv - r2 * hyp2f1_one_a(a, z));
    };
    double r2_hi = 45.0 / (lambda * M_PI);
    cplx e_su = std::exp(-s * (u / gamma));

    auto both = [&](double r2) -> CplxPair {
        double re = std::pow(r2, eps / 2.0);  // R^eps
        cplx c = s_zero ? cplx(0.0, 0.0) : s * power_eff / re;
        double m = u * re / (gamma * power_eff);
        double em = std::exp(-m);
        cplx base = lambda * M_PI * std::exp(-lambda * M_PI * r2) * std::exp(-tail_T(r2));
        cplx psi_part = (1.0 - em * e_su) / (1.0 + c);
        return {base * psi_part, base * em * (re / (gamma * power_eff))};
    };
    auto r = quad::adaptive<CplxPair>(both, 0.0, r2_hi, abs_tol, rel_tol, q.max_subdivisions, 8);
    return {r.value.v, r.value.d * e_su};
}

struct NearestContext {
    std::vector<TierPow> open;
    std::vector<FadingNodes> nodes;
    std::vector<std::vector<double>> psi_pow;  // psi^a per node
    std::vector<bool> exponential;
    std::vector<double> power_eff;
};

inline NearestContext make_nearest_context(const HetNetScenario& sc, int n_nodes) {
    NearestContext ctx;
    ctx.open = open_pows(sc);
    for (std::size_t k = 0; k < sc.open_tiers.size(); ++k) {
        const auto& f = sc.open_tiers[k].fading;
        ctx.exponential.push_back(f.kind == FadingKind::Exponential);
        ctx.power_eff.push_back(sc.open_tiers[k].power *
                                (f.kind == FadingKind::Exponential ? f.param : 1.0));
        ctx.nodes.push_back(fading_nodes(f, n_nodes));
        std::vector<double> pw(ctx.nodes.back().psi.size());
        for (std::size_t i = 0; i < pw.size(); ++i)
            pw[i] = std::pow(ctx.nodes.back().psi[i], ctx.open[k].a);
        ctx.psi_pow.push_back(std::move(pw));
    }
    return ctx;
}

// Quantile-node route: A_k(v) = E_psi1[psi1^a exp(-lambda pi E_psi[psi^a *
// scaled_tail_bracket])]; F_k = lambda (2pi/e)(gamma P)^a u^{-a} I_k with
// I_k the v-integral of v^{-a-1} e^{-s u v/gamma} A_k(v).
inline cplx nearest_tier_A(const NearestContext& ctx, std::size_t k, cplx s, double u, double v) {
    const auto& t = ctx.open[k];
    const auto& nd = ctx.nodes[k];
    cplx acc = 0.0;
    for (std::size_t p = 0; p < nd.psi.size(); ++p) {
        double psi1 = nd.psi[p];
        cplx inner = 0.0;
        for (std::size_t qn = 0; qn < nd.psi.size(); ++qn) {
            cplx w = s * (u * v * nd.psi[qn] / (t.gamma * psi1));
            cplx ratio = t.power * t.gamma * psi1 / (u * v * nd.psi[qn]);
            inner += nd.w[qn] * ctx.psi_pow[k][qn] *
                     scaled_tail_bracket(t.a, s * t.power, w, ratio);
        }
        acc += nd.w[p] * ctx.psi_pow[k][p] * std::exp(-t.lambda * M_PI * inner);
    }
    return acc;
}

inline NearestFactor nearest_factor_generic(const NearestContext& ctx, std::size_t k, cplx s,
                                            double u, const QuadratureSpec& q) {
    const auto& t = ctx.open[k];
    double psi_min = *std::min_element(ctx.nodes[k].psi.begin(), ctx.nodes[k].psi.end());
    double v_lo = std::min(0.5, t.power * t.gamma * psi_min / u *
                                    std::pow(t.lambda * M_PI / 45.0, 1.0 / t.a));
    v_lo = std::max(v_lo, 1e-14);
    auto f = [&](double v) -> cplx {
        return std::pow(v, -t.a - 1.0) * std::exp(-s * (u * v / t.gamma)) *
               nearest_tier_A(ctx, k, s, u, v);
    };
    double phase = std::abs(s.imag()) * u / t.gamma;
    int init = std::max(8, static_cast<int>(phase / M_PI) + 1);
    auto r =
        quad::adaptive<cplx>(f, v_lo, 1.0, 1e-13, q.radial_rel_tol * 0.1, q.max_subdivisions, init);
    double coef = t.lambda * (2.0 * M_PI / t.eps) * std::pow(t.gamma * t.power, t.a) *
                  std::pow(u, -t.a);
    cplx value = coef * r.value;
    cplx du = t.lambda * (2.0 * M_PI / t.eps) * std::pow(t.gamma * t.power, t.a) *
              std::pow(u, -1.0 - t.a) * std::exp(-s * (u / t.gamma)) *
              nearest_tier_A(ctx, k, s, u, 1.0);
    return {value, du};
}

inline NearestFactor nearest_factor(const NearestContext& ctx, std::size_t k, cplx s, double u,
                                    const QuadratureSpec& q, double rel_tol = 0.0,
                                    double abs_tol = 1e-13) {
    const auto& t = ctx.open[k];
    if (rel_tol <= 0.0) rel_tol = q.radial_rel_tol * 0.05;
    if (ctx.exponential[k])
        return nearest_factor_exponential(t.lambda, ctx.power_eff[k], t.eps, t.gamma, s, u, q,
                                          rel_tol, abs_tol);
    return nearest_factor_generic(ctx, k, s, u, q);
}

}  // namespace detail

// Joint transform E[e^{-s(Io+Ic+eta)} 1(max_k gamma_k N_k <= u)] with N_k the
// received power of each tier's nearest point. Non-exponential fading
// expectations use quantile-based Gauss quadrature with node doubling.
inline cplx laplace_joint_nearest(const HetNetScenario& sc, cplx s, double u,
                                  const QuadratureSpec& q = {}) {
    require_valid(sc);
    q.validate();
    if (!(u > 0.0)) throw std::domain_error("laplace_joint_nearest: u must be positive");
    bool needs_nodes = false;
    for (const auto& t : sc.open_tiers)
        if (t.fading.kind == FadingKind::LogNormalDb) needs_nodes = true;
    cplx prev = 0.0;
    for (int n : {16, 32, 64}) {
        auto ctx = detail::make_nearest_context(sc, n);
        cplx val = laplace_closed_interference(sc, s) * std::exp(-s * sc.noise);
        for (std::size_t k = 0; k < ctx.open.size(); ++k) {
            if (ctx.open[k].dbar == 0.0) continue;
            val *= detail::nearest_factor(ctx, k, s, u, q).value;
        }
        if (!needs_nodes) return val;
        if (n > 16 && std::abs(val - prev) <= q.radial_rel_tol * std::abs(val)) return val;
        prev = val;
    }
    return prev;
}

// d/du log of the nearest-point joint transform: sum over tiers of
// (dF_k/du) / F_k.
inline cplx dlog_laplace_nearest(const HetNetScenario& sc, cplx s, double u,
                                 const QuadratureSpec& q = {}) {
    require_valid(sc);
    q.validate();
    if (!(u > 0.0)) throw std::domain_error("dlog_laplace_nearest: u must be positive");
    auto ctx = detail::make_nearest_context(sc, 48);
    cplx total = 0.0;
    for (std::size_t k = 0; k < ctx.open.size(); ++k) {
        if (ctx.open[k].dbar == 0.0) continue;
        auto f = detail::nearest_factor(ctx, k, s, u, q);
        total += f.du / f.value;
    }
    return total;
}

// F(beta, e) = 1/sinc(2 pi/e) + beta^{-2/e} [1 - 2F1(1, 2/e; 1+2/e; -1/beta)];
// mbrp_f_general extends it to the biased comparison ratio z = B_l/(B_k b_k).
namespace detail {
inline double mbrp_f_general(double z, double eps) {
    double a = 2.0 / eps;
    return 1.0 / sinc_fn(2.0 * M_PI / eps) + std::pow(z, a) * (1.0 - hyp2f1_special(a, -z));
}
}  // namespace detail

inline double f_kernel(double beta, double eps) {
    if (!(beta > 0.0)) throw std::domain_error("f_kernel: threshold must be positive");
    if (!(eps > 2.0)) throw std::domain_error("f_kernel: path-loss exponent must exceed 2");
    return detail::mbrp_f_general(1.0 / beta, eps);
}

// ---- beta >= 1 single-integral coverage (max-SINR == MIRP regime) ---------

inline CoverageReport coverage_beta_ge1(const HetNetScenario& sc, const QuadratureSpec& q = {}) {
    require_valid(sc);
    q.validate();
    auto open = detail::open_pows(sc);
    auto closed = detail::closed_pows(sc);
    for (const auto& t : open)
        if (t.beta < 1.0)
            throw std::domain_error("coverage_beta_ge1: requires all thresholds >= 1");

    CoverageReport rep;
    rep.method = CoverageMethod::Analytic;
    rep.tier_serving_prob.assign(open.size(), 0.0);

    bool common_eps = !open.empty();
    double eps0 = open.empty() ? 0.0 : open.front().eps;
    for (const auto& t : open) common_eps &= (t.eps == eps0);
    for (const auto& t : closed) common_eps &= (t.eps == eps0);

    if (common_eps && sc.noise == 0.0) {
        double denom = 0.0;
        for (const auto& t : open) denom += t.dbar;
        for (const auto& t : closed) denom += t.dbar;
        if (denom == 0.0) return rep;
        double s = sinc_fn(2.0 * M_PI / eps0);
        for (std::size_t k = 0; k < open.size(); ++k) {
            rep.tier_serving_prob[k] =
                open[k].dbar * s * std::pow(open[k].beta, -open[k].a) / denom;
            rep.probability += rep.tier_serving_prob[k];
        }
        rep.probability = detail::clamp_probability(rep.probability, 1e-12, "coverage_beta_ge1");
        return rep;
    }

    // interference slopes shared by every serving tier
    std::vector<double> slope, eps_of;
    for (const auto& t : open) {
        slope.push_back(t.dbar / (gamma_fn(1.0 + t.a) * sinc_fn(2.0 * M_PI / t.eps)));
        eps_of.push_back(t.eps);
    }
    for (const auto& t : closed) {
        slope.push_back(t.dbar / (gamma_fn(1.0 + t.a) * sinc_fn(2.0 * M_PI / t.eps)));
        eps_of.push_back(t.eps);
    }

    double err = 0.0;
    for (std::size_t k = 0; k < open.size(); ++k) {
        const auto& t = open[k];
        if (t.dbar == 0.0) continue;
        double pref = (t.dbar / M_PI) * std::pow(t.beta, -t.a) / gamma_fn(1.0 + t.a);
        auto exponent = [&](double u) {  // u = r^2
            double e = sc.noise * std::pow(u, t.eps / 2.0);
            for (std::size_t j = 0; j < slope.size(); ++j)
                e += slope[j] * std::pow(u, t.eps / eps_of[j]);
            return e;
        };
        double u_hi = quad::solve_increasing(exponent, 45.0);
        auto f = [&](double u) { return std::exp(-exponent(u)); };
        auto r = quad::adaptive<double>(f, 0.0, u_hi, 1e-14, 1e-11, q.max_subdivisions, 16);
        double term = pref * M_PI * r.value;
        rep.tier_serving_prob[k] = term;
        rep.probability += term;
        err += pref * M_PI * r.error;
    }
    rep.stderr_est = err;
    rep.probability =
        detail::clamp_probability(rep.probability, std::max(1e-9, 5.0 * err), "coverage_beta_ge1");
    return rep;
}

// ---- MBRP with exponential fading ------------------------------------------

// Coverage under maximum biased averaged received power association when all
// fading laws are exponential (means folded into the powers). The serving
// slice for tier k uses the comparison ratio z = B_l / (B_k beta_k) in the
// F factor.
inline CoverageReport coverage_mbrp_exp(const HetNetScenario& sc, const std::vector<double>& biases,
                                        const QuadratureSpec& q = {}) {
    require_valid(sc);
    q.validate();
    if (biases.size() != sc.open_tiers.size())
        throw std::invalid_argument("coverage_mbrp_exp: need one bias per open tier");
    for (double b : biases)
        if (!(b > 0.0)) throw std::invalid_argument("coverage_mbrp_exp: biases must be positive");
    for (const auto& t : sc.open_tiers)
        if (t.fading.kind != FadingKind::Exponential)
            throw std::domain_error("coverage_mbrp_exp: requires exponential fading on every tier");
    for (const auto& t : sc.closed_tiers)
        if (t.fading.kind != FadingKind::Exponential)
            throw std::domain_error("coverage_mbrp_exp: requires exponential fading on every tier");

    const std::size_t K = sc.open_tiers.size();
    std::vector<double> pbar(K), abar(K), epso(K), beta(K);
    for (std::size_t k = 0; k < K; ++k) {
        pbar[k] = sc.open_tiers[k].power * sc.open_tiers[k].fading.param;
        epso[k] = sc.open_tiers[k].pathloss_exp;
        abar[k] = 2.0 / epso[k];
        beta[k] = sc.open_tiers[k].sinr_threshold;
    }
    std::vector<double> cbar, ceps;
    for (const auto& t : sc.closed_tiers) {
        cbar.push_back(t.density * M_PI * std::pow(t.power * t.fading.param, 2.0 / t.pathloss_exp) /
                       sinc_fn(2.0 * M_PI / t.pathloss_exp));
        ceps.push_back(t.pathloss_exp);
    }

    CoverageReport rep;
    rep.method = CoverageMethod::Analytic;
    rep.tier_serving_prob.assign(K, 0.0);

    bool common_eps = true;
    for (std::size_t k = 0; k < K; ++k) common_eps &= (epso[k] == epso[0]);
    for (double e : ceps) common_eps &= (e == epso[0]);

    double err = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        double lam = sc.open_tiers[k].density;
        if (lam == 0.0) continue;
        double a = abar[k];
        double pref = lam * std::pow(pbar[k], a) * std::pow(beta[k], -a);
        std::vector<double> slope(K);
        for (std::size_t l = 0; l < K; ++l)
            slope[l] = sc.open_tiers[l].density * M_PI * std::pow(pbar[l], abar[l]) *
                       detail::mbrp_f_general(biases[l] / (biases[k] * beta[k]), epso[l]);
        if (common_eps && sc.noise == 0.0) {
            double denom = 0.0;
            for (double s : slope) denom += s;
            for (double c : cbar) denom += c;
            if (denom == 0.0) continue;
            rep.tier_serving_prob[k] = pref * M_PI / denom;
        } else {
            auto exponent = [&](double u) {  // u = r^2
                double e = sc.noise * std::pow(u, epso[k] / 2.0);
                for (std::size_t l = 0; l < K; ++l) e += slope[l] * std::pow(u, epso[k] / epso[l]);
                for (std::size_t l = 0; l < cbar.size(); ++l)
                    e += cbar[l] * std::pow(u, epso[k] / ceps[l]);
                return e;
            };
            double u_hi = quad::solve_increasing(exponent, 45.0);
            auto f = [&](double u) { return std::exp(-exponent(u)); };
            auto r = quad::adaptive<double>(f, 0.0, u_hi, 1e-14, 1e-11, q.max_subdivisions, 16);
            rep.tier_serving_prob[k] = pref * M_PI * r.value;
            err += pref * M_PI * r.error;
        }
        rep.probability += rep.tier_serving_prob[k];
    }
    rep.stderr_est = err;
    rep.probability =
        detail::clamp_probability(rep.probability, std::max(1e-9, 5.0 * err), "coverage_mbrp_exp");
    return rep;
}

// Serving-tier p.m.f. under biased association; arbitrary fading (only the
// mean enters). Closed form when the exponents agree.
inline std::vector<double> tier_pmf_mbrp(const HetNetScenario& sc,
                                         const std::vector<double>& biases) {
    require_valid(sc);
    if (biases.size() != sc.open_tiers.size())
        throw std::invalid_argument("tier_pmf_mbrp: need one bias per open tier");
    const std::size_t K = sc.open_tiers.size();
    std::vector<double> weight(K), a(K);
    bool common_eps = true;
    for (std::size_t k = 0; k < K; ++k) {
        const auto& t = sc.open_tiers[k];
        if (!(biases[k] > 0.0))
            throw std::invalid_argument("tier_pmf_mbrp: biases must be positive");
        a[k] = 2.0 / t.pathloss_exp;
        weight[k] = t.density * M_PI * std::pow(t.power * fading_mean(t.fading) * biases[k], a[k]);
        common_eps &= (t.pathloss_exp == sc.open_tiers.front().pathloss_exp);
    }
    std::vector<double> pmf(K, 0.0);
    double wsum = 0.0;
    for (double w : weight) wsum += w;
    if (wsum == 0.0) return pmf;
    if (common_eps) {
        for (std::size_t k = 0; k < K; ++k) pmf[k] = weight[k] / wsum;
        return pmf;
    }
    for (std::size_t k = 0; k < K; ++k) {
        if (weight[k] == 0.0) continue;
        auto exponent = [&](double r) {
            double e = 0.0;
            for (std::size_t l = 0; l < K; ++l) e += weight[l] * std::pow(r, a[l]);
            return e;
        };
        double r_hi = quad::solve_increasing(exponent, 45.0);
        auto g = [&](double x) {  // r = x^2 softens the r^{a-1} endpoint
            double r = x * x;
            return a[k] * weight[k] * std::pow(r, a[k] - 1.0) * std::exp(-exponent(r)) * 2.0 * x;
        };
        auto res = quad::adaptive<double>(g, 0.0, std::sqrt(r_hi), 1e-14, 1e-11, 4000, 16);
        pmf[k] = res.value;
    }
    return pmf;
}

// Joint density of (serving tier, equivalent serving distance) under biased
// association; integrates over r to the tier p.m.f.
inline double serving_joint_density_mbrp(const HetNetScenario& sc,
                                         const std::vector<double>& biases, std::size_t k,
                                         double r) {
    require_valid(sc);
    if (k >= sc.open_tiers.size())
        throw std::invalid_argument("serving_joint_density_mbrp: bad tier index");
    if (r < 0.0) throw std::domain_error("serving_joint_density_mbrp: r must be nonnegative");
    if (r == 0.0) return 0.0;
    auto dens = mbrp_1d_densities(sc, biases);
    double expo = 0.0;
    for (const auto& d : dens.open) expo += d.integral_to(r);
    return dens.open[k](r) * std::exp(-expo);
}

// ---- MIRP coverage: general path (r outer, oscillatory omega inner) -------

namespace detail {

struct MirpTerms {
    std::vector<TierPow> open, closed;
};

// Per-serving-tier coverage slice: c_k int 2 pi r inner(r) dr with inner(r)
// the no-nearer-point factor times the conditional window probability,
// evaluated as a half-line frequency integral.
inline std::pair<double, double> mirp_tier_slice(const HetNetScenario& sc, std::size_t k,
                                                 const MirpTerms& tp, const QuadratureSpec& q,
                                                 double tol_abs) {
    const TierPow& tk = tp.open[k];
    double eps_k = tk.eps, beta = tk.beta;
    double c_k = tk.dbar / M_PI;  // lambda P^a E[Psi^a]
    if (c_k == 0.0) return {0.0, 0.0};
    double eta = sc.noise;

    std::vector<double> q_open, q_closed;
    for (const auto& t : tp.open) q_open.push_back(2.0 * eps_k / t.eps);
    for (const auto& t : tp.closed) q_closed.push_back(2.0 * eps_k / t.eps);

    double a_min = 1.0;
    for (const auto& t : tp.open) a_min = std::min(a_min, t.a);
    for (const auto& t : tp.closed) a_min = std::min(a_min, t.a);

    auto void_exp = [&](double r) {
        double e = 0.0;
        for (std::size_t l = 0; l < tp.open.size(); ++l)
            e += tp.open[l].dbar * std::pow(r, q_open[l]);
        return e;
    };
    double r_hi = quad::solve_increasing(void_exp, 45.0);
    if (eta > 0.0)
        r_hi = std::min(r_hi, std::pow(1.0 / (beta * eta), 1.0 / eps_k) * (1.0 - 1e-12));

    // Exceedance bound on the conditional non-coverage accumulated over
    // [0, r]: one point above x/2 plus a Markov bound on the remainder.
    auto small_region_err = [&](double r) {
        double x = 1.0 / beta - eta * std::pow(r, eps_k);
        if (!(x > 0.0)) return 1e300;
        double e = 0.0;
        for (std::size_t l = 0; l < tp.open.size(); ++l)
            e += 2.0 * M_PI * c_k * tp.open[l].dbar * std::pow(2.0 / x, tp.open[l].a) /
                 (1.0 - tp.open[l].a) * std::pow(r, 2.0 + q_open[l]) / (2.0 + q_open[l]);
        for (std::size_t l = 0; l < tp.closed.size(); ++l)
            e += 2.0 * M_PI * c_k * tp.closed[l].dbar * std::pow(2.0 / x, tp.closed[l].a) /
                 (1.0 - tp.closed[l].a) * std::pow(r, 2.0 + q_closed[l]) / (2.0 + q_closed[l]);
        return e;
    };
    double r_lo = quad::solve_increasing(small_region_err, 0.08 * tol_abs, 0.01);
    r_lo = std::min(r_lo, 0.5 * r_hi);
    double err = small_region_err(r_lo);

    double prob = 0.0;
    {  // mass below r_lo, conditional coverage taken as certain
        auto g = [&](double r) { return 2.0 * M_PI * c_k * r * std::exp(-void_exp(r)); };
        auto res = quad::adaptive<double>(g, 0.0, r_lo, 1e-15, 1e-10, 2000, 8);
        prob += res.value;
        err += res.error;
    }

    double inner_tol = tol_abs * 0.25 / std::max(M_PI * c_k * (r_hi * r_hi - r_lo * r_lo), 1e-30);
    inner_tol = std::max(inner_tol, 1e-12);

    auto inner = [&](double r) -> std::pair<double, double> {
        double t_equiv = std::pow(r, eps_k);
        std::vector<double> d_open(tp.open.size()), d_closed(tp.closed.size());
        for (std::size_t l = 0; l < tp.open.size(); ++l)
            d_open[l] = tp.open[l].dbar * std::pow(r, q_open[l]);
        for (std::size_t l = 0; l < tp.closed.size(); ++l)
            d_closed[l] = tp.closed[l].dbar * std::pow(r, q_closed[l]);
        double c1 = eta * t_equiv, c2 = eta * t_equiv - 1.0 / beta;
        auto f = [&](double w) -> EnvVal {
            cplx S = 0.0;
            for (std::size_t l = 0; l < tp.open.size(); ++l)
                S += d_open[l] * hyp1f1(-tp.open[l].a, 1.0 - tp.open[l].a, cplx(0.0, w));
            for (std::size_t l = 0; l < tp.closed.size(); ++l)
                S += d_closed[l] * g_kernel(w, tp.closed[l].a);
            cplx val = window_kernel(w, c1, c2) * std::exp(-S);
            return {2.0 * val.real(), S.real()};
        };
        double freq = std::abs(eta * t_equiv - 0.5 / beta) + 0.5 / beta;
        auto hl = integrate_halfline(f, freq, a_min, inner_tol, q, 0.75);
        return {hl.value, hl.error};
    };

    auto weighted = [&](double r) -> std::pair<double, double> {
        auto [v, e] = inner(r);
        return {2.0 * M_PI * c_k * r * v, 2.0 * M_PI * c_k * r * e};
    };
    auto comp = composite_weighted(weighted, r_lo, r_hi, 16, 3, 0.2 * tol_abs);
    prob += comp.value;
    err += comp.side_error + comp.delta;
    err += 2.0 * M_PI * c_k * r_hi * r_hi * std::exp(-45.0);
    return {prob, err};
}

}  // namespace detail

// Coverage under maximum instantaneous received power association; arbitrary
// fading and per-tier exponents. Per-tier slices populate tier_serving_prob.
inline CoverageReport coverage_mirp(const HetNetScenario& sc, const QuadratureSpec& q = {}) {
    require_valid(sc);
    q.validate();
    detail::MirpTerms tp{detail::open_pows(sc), detail::closed_pows(sc)};
    CoverageReport rep;
    rep.method = CoverageMethod::Analytic;
    rep.tier_serving_prob.assign(sc.open_tiers.size(), 0.0);
    double tol_abs = std::clamp(10.0 * q.radial_rel_tol, 1e-6, 1e-3);
    double err = 0.0;
    for (std::size_t k = 0; k < sc.open_tiers.size(); ++k) {
        auto [p, e] = detail::mirp_tier_slice(sc, k, tp, q, tol_abs);
        rep.tier_serving_prob[k] = std::min(1.0, std::max(0.0, p));
        rep.probability += p;
        err += e;
    }
    rep.stderr_est = err;
    if (err > 5e-3)
        throw NumericsError("coverage_mirp: quadrature error estimate " + std::to_string(err) +
                            " above tolerance");
    rep.probability =
        detail::clamp_probability(rep.probability, std::max(1e-8, 5.0 * err), "coverage_mirp");
    return rep;
}

// ---- MIRP coverage: common-exponent normalized path ------------------------

namespace detail {

// J(beta) = int window-kernel x H over the real line for the unit-density
// normalized network; when the normalized noise vanishes H = 1/D in closed
// form and the algebraic tail is added via the upper incomplete gamma.
inline std::pair<double, double> mirp_common_eps_integral(double beta, double a,
                                                          double lambda_hat, double eta_bar,
                                                          double eps, const QuadratureSpec& q) {
    auto D = [&](double w) -> cplx {
        return hyp1f1(-a, 1.0 - a, cplx(0.0, w)) + lambda_hat * g_kernel(w, a);
    };
    double gtail = gamma_fn(1.0 - a);
    double c_t = 1.0 / ((1.0 + lambda_hat) * gtail);

    std::function<cplx(double)> H;
    if (eta_bar == 0.0) {
        H = [D](double w) -> cplx { return 1.0 / D(w); };
    } else {
        H = [&, D](double w) -> cplx {
            cplx d = D(w);
            auto f = [&](double u) -> cplx {
                return std::exp(cplx(0.0, w * eta_bar * std::pow(u / M_PI, eps / 2.0)) - u * d);
            };
            double u_hi = 45.0 / std::max(d.real(), 1e-9);
            double phase = std::abs(w) * eta_bar * std::pow(u_hi / M_PI, eps / 2.0);
            int init = std::max(8, static_cast<int>(phase / M_PI) + 2);
            auto r = quad::adaptive<cplx>(f, 0.0, u_hi, 1e-13, 1e-9, q.max_subdivisions, init);
            return r.value;
        };
    }

    double tol = (eta_bar == 0.0) ? std::max(1e-10, 0.02 * q.radial_rel_tol)
                                  : std::max(2e-5, 3.0 * q.radial_rel_tol);
    // truncation point from the second-order error of the 1/D tail model
    auto tail_model_err = [&](double om) {
        double delta =
            (a / om) / ((1.0 + lambda_hat) * gtail * std::pow(om, a) * std::cos(M_PI * a / 2.0));
        return 2.0 * delta * c_t * std::pow(om, -a) / (M_PI * a);
    };
    // with noise, H(w) -> M / D(w): the endpoint phase parameter tends to a
    // constant, leaving the 1/D tail damped by
    // M = int_0^inf exp(-(eta_bar/C) v^{e/2} - v) dv, C = (pi(1+l)G(1-a))^{e/2}
    double m_damp = 1.0;
    if (eta_bar > 0.0) {
        double cbig = std::pow(M_PI * (1.0 + lambda_hat) * gtail, eps / 2.0);
        auto g = [&](double v) {
            return std::exp(-(eta_bar / cbig) * std::pow(v, eps / 2.0) - v);
        };
        double v_hi = quad::solve_increasing(
            [&](double v) { return (eta_bar / cbig) * std::pow(v, eps / 2.0) + v; }, 45.0);
        m_damp = quad::adaptive<double>(g, 0.0, v_hi, 1e-14, 1e-11, 2000, 16).value;
    }
    double asym_mismatch = 0.0;
    double omega_cut = 256.0;
    if (eta_bar == 0.0) {
        while (omega_cut < q.omega_max && tail_model_err(omega_cut) > 0.2 * tol) omega_cut *= 2.0;
    } else {
        while (omega_cut < q.omega_max) {
            cplx asym = m_damp * c_t * std::exp(cplx(0.0, M_PI * a / 2.0)) *
                        std::pow(omega_cut, -a);
            asym_mismatch = std::abs(H(omega_cut) - asym) / std::abs(asym);
            if (asym_mismatch <= 0.05 && std::abs(asym) * asym_mismatch / (M_PI * a) < 0.3 * tol)
                break;
            omega_cut *= 2.0;
        }
    }

    auto f = [&](double w) {
        cplx val = window_kernel(w, 0.0, -1.0 / beta) * H(w);
        return 2.0 * val.real();
    };
    double freq = 1.0 / beta + eta_bar;
    int init =
        std::max(q.omega_points, static_cast<int>(omega_cut * freq / (2.0 * M_PI) * 1.3) + 4);
    auto body = quad::adaptive<double>(f, 0.0, omega_cut, 0.2 * tol, 0.0, q.max_subdivisions, init);

    double value = body.value;
    double error = body.error;
    // algebraic tail added in closed form: the kernel against c (-j w)^{-a}
    double c_tail = c_t * m_damp;
    cplx pref = c_tail * std::exp(cplx(0.0, M_PI * a / 2.0)) / cplx(0.0, 2.0 * M_PI);
    cplx tail = pref * (std::pow(omega_cut, -a) / a -
                        std::pow(cplx(0.0, 1.0 / beta), a) *
                            gamma_upper_inc(-a, cplx(0.0, omega_cut / beta)));
    value += 2.0 * tail.real();
    if (eta_bar == 0.0) {
        error += tail_model_err(omega_cut);
    } else {
        error += (asym_mismatch + 0.02) * c_tail * std::pow(omega_cut, -a) / (M_PI * a);
    }
    return {value, error};
}

}  // namespace detail

// Common-exponent MIRP coverage through the normalized two-tier network:
// per-tier weights w_k times a single frequency integral J(beta_k).
inline CoverageReport coverage_mirp_same_eps(const HetNetScenario& sc,
                                             const QuadratureSpec& q = {}) {
    require_valid(sc);
    q.validate();
    double eps = sc.open_tiers.front().pathloss_exp;
    for (const auto& t : sc.open_tiers)
        if (t.pathloss_exp != eps)
            throw std::domain_error("coverage_mirp_same_eps: mixed path-loss exponents");
    for (const auto& t : sc.closed_tiers)
        if (t.pathloss_exp != eps)
            throw std::domain_error("coverage_mirp_same_eps: mixed path-loss exponents");
    double a = 2.0 / eps;
    auto open = detail::open_pows(sc);
    double wsum = 0.0;
    for (const auto& t : open) wsum += t.dbar;
    CoverageReport rep;
    rep.method = CoverageMethod::Analytic;
    rep.tier_serving_prob.assign(open.size(), 0.0);
    if (wsum == 0.0) return rep;
    auto reduced = same_eps_reduction(sc);

    std::map<double, std::pair<double, double>> j_cache;
    double err = 0.0;
    for (std::size_t k = 0; k < open.size(); ++k) {
        if (open[k].dbar == 0.0) continue;
        auto it = j_cache.find(open[k].beta);
        if (it == j_cache.end()) {
            auto r = detail::mirp_common_eps_integral(open[k].beta, a, reduced.closed_density,
                                                      reduced.noise, eps, q);
            it = j_cache.emplace(open[k].beta, r).first;
        }
        rep.tier_serving_prob[k] = open[k].dbar / wsum * it->second.first;
        rep.probability += rep.tier_serving_prob[k];
        err += open[k].dbar / wsum * it->second.second;
    }
    rep.stderr_est = err;
    rep.probability = detail::clamp_probability(rep.probability, std::max(1e-8, 5.0 * err),
                                                "coverage_mirp_same_eps");
    return rep;
}

// ---- general coverage (max-SINR / nearest) via the inversion integrals -----

namespace detail {

// exp(-S) is the max-power joint transform at (jw, y); returns S.
inline cplx maxsinr_joint_exponent(const std::vector<TierPow>& open,
                                   const std::vector<TierPow>& closed, double eta, double w,
                                   double y) {
    cplx s(0.0, w);
    cplx S = s * eta;
    for (const auto& t : closed) {
        if (t.dbar == 0.0) continue;
        S += t.dbar * gamma_fn(1.0 - t.a) * std::pow(s, t.a);
    }
    for (const auto& t : open) {
        if (t.dbar == 0.0) continue;
        S += t.dbar / std::pow(t.power, t.a) *
             scaled_tail_bracket(t.a, s * t.power, s * (y / t.gamma), t.power * t.gamma / y);
    }
    return S;
}

}  // namespace detail

// Double-integral coverage for the max-SINR and nearest-point association
// rules (the expensive validation path; target absolute accuracy ~1e-3 with
// the achieved estimate in stderr_est). The far tail in the conditioning
// variable is added in closed form with its residual folded into the
// estimate; tier_serving_prob stays empty (no per-tier decomposition here).
inline CoverageReport coverage_general(const HetNetScenario& sc, const ConnectivityModel& model,
                                       const QuadratureSpec& q = {}) {
    require_valid(sc);
    q.validate();
    if (model.kind != ConnectivityModel::Kind::MaxSinr &&
        model.kind != ConnectivityModel::Kind::NearestBs)
        throw std::invalid_argument("coverage_general: supports max-SINR and nearest-BS only");
    const bool nearest = model.kind == ConnectivityModel::Kind::NearestBs;

    auto open = detail::open_pows(sc);
    auto closed = detail::closed_pows(sc);
    double eta = sc.noise;
    CoverageReport rep;
    rep.method = CoverageMethod::Analytic;
    rep.tier_serving_prob.assign(sc.open_tiers.size(), 0.0);

    double open_total = 0.0;
    for (const auto& t : open) open_total += t.dbar;
    if (open_total == 0.0) return rep;

    const double tol = std::clamp(1e4 * q.radial_rel_tol, 1e-3, 1e-2);

    double kappa = 0.0;
    for (const auto& t : open) kappa = std::max(kappa, t.gamma);
    double a_min = 1.0;
    for (const auto& t : open) a_min = std::min(a_min, t.a);
    for (const auto& t : closed) a_min = std::min(a_min, t.a);

    // hazard scale of max gamma M (also bounds the nearest variant)
    auto phi0 = [&](double y) {
        double e = 0.0;
        for (const auto& t : open)
            e += t.dbar / std::pow(t.power, t.a) * std::pow(t.gamma * t.power / y, t.a);
        return e;
    };
    auto q2d = [&](double w) {  // exceedance bound on P(interference >= w)
        if (!(w > 0.0)) return 1e300;
        double e = 0.0;
        for (const auto& t : open) e += t.dbar * std::pow(2.0 / w, t.a) / (1.0 - t.a);
        for (const auto& t : closed) e += t.dbar * std::pow(2.0 / w, t.a) / (1.0 - t.a);
        return e;
    };

    double y_floor = (eta > 0.0) ? eta * kappa / (kappa - 1.0) : 0.0;
    double y_lo = 1.0 / quad::solve_increasing([&](double z) { return phi0(1.0 / z); }, 45.0);
    y_lo = std::max(y_lo, y_floor * (1.0 + 1e-9));
    auto tail_err_at = [&](double y) {
        double t = -std::expm1(-phi0(y));
        return t * std::min(1.0, q2d((1.0 - 1.0 / kappa) * y - eta));
    };
    double y_hi = quad::solve_increasing([&](double z) { return 1.0 / tail_err_at(z); },
                                         4.0 / tol, std::max(10.0 * y_lo, 1.0));
    if (y_hi <= y_lo * 1.001) y_hi = y_lo * 10.0;

    detail::NearestContext nctx;
    if (nearest) nctx = detail::make_nearest_context(sc, 24);

    double inner_tol_scale = tol * 0.02 / std::max(std::log(y_hi / y_lo), 1e-3);

    auto y_integrand = [&](double v) -> std::pair<double, double> {
        double y = std::exp(v);
        double c1 = y, c2 = y / kappa + eta;
        if (c1 <= c2) return {0.0, 0.0};
        // effective oscillation after the per-tier e^{-j w y/gamma_i} shift
        double freq = eta + 0.1;
        for (const auto& t : open)
            freq = std::max(freq, std::max(std::abs(c1 - y / t.gamma),
                                           std::abs(c2 - y / t.gamma)) + eta);
        detail::HalfLineOut hl;
        if (!nearest) {
            auto f = [&](double w) -> detail::EnvVal {
                cplx S = detail::maxsinr_joint_exponent(open, closed, eta, w, y);
                cplx L = std::exp(-S);
                cplx acc = 0.0;
                for (const auto& t : open) {
                    if (t.dbar == 0.0) continue;
                    double coef = t.lambda * (2.0 * M_PI / t.eps) *
                                  std::pow(t.gamma * t.power, t.a) * t.moment *
                                  std::pow(y, -1.0 - t.a);
                    acc += coef * std::exp(cplx(0.0, -w * y / t.gamma));
                }
                cplx val = L * acc * detail::window_kernel(w, c1, c2);
                return {2.0 * val.real(), S.real()};
            };
            hl = detail::integrate_halfline(f, freq, a_min, inner_tol_scale, q);
        } else {
            auto f = [&](double w) -> detail::EnvVal {
                cplx s(0.0, w);
                cplx L = laplace_closed_interference(sc, s) * std::exp(-s * eta);
                cplx ratio_sum = 0.0;
                double env = 0.0;
                for (const auto& t : closed)
                    env += t.dbar * gamma_fn(1.0 - t.a) * std::cos(M_PI * t.a / 2.0) *
                           std::pow(std::abs(w), t.a);
                for (std::size_t k = 0; k < open.size(); ++k) {
                    const auto& t = open[k];
                    if (t.dbar == 0.0) continue;
                    auto fac = detail::nearest_factor(nctx, k, s, y, q, 3e-4, 1e-8);
                    L *= fac.value;
                    if (std::abs(fac.value) > 1e-280) ratio_sum += fac.du / fac.value;
                    env += t.dbar * gamma_fn(1.0 - t.a) * std::cos(M_PI * t.a / 2.0) *
                           std::pow(std::abs(w), t.a);
                }
                cplx val = L * ratio_sum * detail::window_kernel(w, c1, c2);
                return {2.0 * val.real(), env};
            };
            hl = detail::integrate_halfline(f, freq, a_min, inner_tol_scale, q, 0.55);
        }
        return {y * hl.value, y * hl.error};
    };

    auto comp = detail::adaptive_weighted(y_integrand, std::log(y_lo), std::log(y_hi),
                                          0.15 * tol, nearest ? 8 : 20, nearest ? 24 : 120);

    // analytic far tail: conditioning variable beyond y_hi is covered except
    // on a set bounded by the interference exceedance estimate
    double tail_p;
    if (!nearest) {
        tail_p = -std::expm1(-phi0(y_hi));
    } else {
        double prod = 1.0;
        for (std::size_t k = 0; k < open.size(); ++k) {
            const auto& t = open[k];
            if (t.dbar == 0.0) continue;
            auto nd = detail::fading_nodes(sc.open_tiers[k].fading, 32);
            double e = 0.0;
            for (std::size_t i = 0; i < nd.psi.size(); ++i)
                e += nd.w[i] * std::exp(-t.lambda * M_PI *
                                        std::pow(t.power * t.gamma * nd.psi[i] / y_hi, t.a));
            prod *= e;
        }
        tail_p = 1.0 - prod;
    }
    double tail_resid = tail_p * std::min(1.0, q2d((1.0 - 1.0 / kappa) * y_hi - eta));

    rep.probability = comp.value + tail_p;
    rep.stderr_est = comp.error + comp.side + tail_resid;
    if (rep.stderr_est > 2e-2)
        throw NumericsError("coverage_general: error estimate " +
                            std::to_string(rep.stderr_est) + " above tolerance");
    rep.probability = detail::clamp_probability(
        rep.probability, std::max(1e-6, 5.0 * rep.stderr_est), "coverage_general");
    return rep;
}

// ---- analytic dispatch ------------------------------------------------------

// Routes each association rule to its cheapest valid analytic form: equal
// thresholds or thresholds >= 1 collapse max-SINR to the max-power paths and
// nearest-BS to the biased-association path.
inline CoverageReport analytic_coverage(const HetNetScenario& sc, const ConnectivityModel& model,
                                        const QuadratureSpec& q = {}) {
    require_valid(sc);
    auto common_eps = [&]() {
        double e = sc.open_tiers.front().pathloss_exp;
        for (const auto& t : sc.open_tiers)
            if (t.pathloss_exp != e) return false;
        for (const auto& t : sc.closed_tiers)
            if (t.pathloss_exp != e) return false;
        return true;
    };
    auto common_beta = [&]() {
        double b = sc.open_tiers.front().sinr_threshold;
        for (const auto& t : sc.open_tiers)
            if (t.sinr_threshold != b) return false;
        return true;
    };
    auto all_ge1 = [&]() {
        for (const auto& t : sc.open_tiers)
            if (t.sinr_threshold < 1.0) return false;
        return true;
    };
    auto all_exponential = [&]() {
        for (const auto& t : sc.open_tiers)
            if (t.fading.kind != FadingKind::Exponential) return false;
        for (const auto& t : sc.closed_tiers)
            if (t.fading.kind != FadingKind::Exponential) return false;
        return true;
    };
    auto mirp_route = [&]() {
        return common_eps() ? coverage_mirp_same_eps(sc, q) : coverage_mirp(sc, q);
    };
    switch (model.kind) {
        case ConnectivityModel::Kind::Mirp:
            return mirp_route();
        case ConnectivityModel::Kind::MaxSinr:
            if (all_ge1()) return coverage_beta_ge1(sc, q);
            if (common_beta()) return mirp_route();
            return coverage_general(sc, model, q);
        case ConnectivityModel::Kind::Mbrp:
            return coverage_mbrp_exp(sc, model.biases, q);
        case ConnectivityModel::Kind::NearestBs: {
            if ((common_beta() || all_ge1()) && all_exponential()) {
                std::vector<double> b;
                for (const auto& t : sc.open_tiers)
                    b.push_back(1.0 / (t.power * fading_mean(t.fading)));
                return coverage_mbrp_exp(sc, b, q);
            }
            return coverage_general(sc, model, q);
        }
    }
    throw std::logic_error("analytic_coverage: unreachable");
}

}  // namespace hetnet
