// hetnetcov: coverage probability calculator for K-tier Poisson cellular
// networks. Subcommands: coverage (single evaluation), sweep (parameter
// sweep to CSV, optional SVG), compare (model ordering table).

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hetnet/hetnet.hpp"

namespace {

using namespace hetnet;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumerics = 3;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

HetNetScenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open scenario file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return scenario_from_string(ss.str());
}

ConnectivityModel::Kind parse_model(const std::string& name) {
    if (name == "maxsinr") return ConnectivityModel::Kind::MaxSinr;
    if (name == "nearest") return ConnectivityModel::Kind::NearestBs;
    if (name == "mirp") return ConnectivityModel::Kind::Mirp;
    if (name == "mbrp") return ConnectivityModel::Kind::Mbrp;
    throw InputError("unknown model '" + name + "' (expected maxsinr|nearest|mirp|mbrp)");
}

ConnectivityModel make_model(ConnectivityModel::Kind kind, const HetNetScenario& sc) {
    ConnectivityModel m;
    m.kind = kind;
    if (kind == ConnectivityModel::Kind::Mbrp)
        m.biases.assign(sc.open_tiers.size(), 0.0),
            std::transform(sc.open_tiers.begin(), sc.open_tiers.end(), m.biases.begin(),
                           [](const TierConfig& t) { return t.bias; });
    return m;
}

bool all_exponential(const HetNetScenario& sc) {
    for (const auto& t : sc.open_tiers)
        if (t.fading.kind != FadingKind::Exponential) return false;
    for (const auto& t : sc.closed_tiers)
        if (t.fading.kind != FadingKind::Exponential) return false;
    return true;
}

bool common_beta(const HetNetScenario& sc) {
    for (const auto& t : sc.open_tiers)
        if (t.sinr_threshold != sc.open_tiers.front().sinr_threshold) return false;
    return true;
}

bool all_beta_ge1(const HetNetScenario& sc) {
    for (const auto& t : sc.open_tiers)
        if (t.sinr_threshold < 1.0) return false;
    return true;
}

// Default engine: analytic wherever a production-grade closed/semi-closed
// path exists, Monte-Carlo otherwise (notably arbitrary-fading nearest-BS).
bool analytic_by_default(const HetNetScenario& sc, ConnectivityModel::Kind kind) {
    switch (kind) {
        case ConnectivityModel::Kind::Mirp: return true;
        case ConnectivityModel::Kind::Mbrp: return all_exponential(sc);
        case ConnectivityModel::Kind::MaxSinr: return all_beta_ge1(sc) || common_beta(sc);
        case ConnectivityModel::Kind::NearestBs:
            return all_exponential(sc) && (all_beta_ge1(sc) || common_beta(sc));
    }
    return false;
}

struct Options {
    std::string scenario_path;
    std::string engine = "auto";
    long long trials = 200000;
    std::uint64_t seed = 1;
    double disk_radius = 0.0;  // 0 = auto
    QuadratureSpec quad;
    std::string out_path;
};

SimConfig sim_config(const Options& o) {
    SimConfig cfg;
    cfg.trials = o.trials;
    cfg.seed = o.seed;
    if (o.disk_radius > 0.0) {
        cfg.guard = SimConfig::Guard::FixedRadius;
        cfg.disk_radius = o.disk_radius;
    }
    return cfg;
}

CoverageReport run_engine(const HetNetScenario& sc, const ConnectivityModel& model, bool analytic,
                          const Options& o) {
    if (analytic) return analytic_coverage(sc, model, o.quad);
    return estimate_coverage(sc, model, sim_config(o));
}

void csv_header(std::ostream& os, std::size_t tiers, bool with_param) {
    if (with_param) os << "param,value,";
    os << "model,engine,probability,stderr,conditional_rate";
    for (std::size_t k = 1; k <= tiers; ++k) os << ",tier_serving_" << k;
    os << "\n";
}

void csv_row(std::ostream& os, const std::string& model, const CoverageReport& rep,
             std::size_t tiers) {
    os << model << ',' << (rep.method == CoverageMethod::Analytic ? "analytic" : "montecarlo")
       << ',' << fmt(rep.probability) << ',' << fmt(rep.stderr_est) << ',';
    if (rep.conditional_rate) os << fmt(*rep.conditional_rate);
    for (std::size_t k = 0; k < tiers; ++k) {
        os << ',';
        if (k < rep.tier_serving_prob.size()) os << fmt(rep.tier_serving_prob[k]);
        else os << fmt(0.0);
    }
    os << "\n";
}

// ---- sweep ------------------------------------------------------------------

struct ParamPath {
    enum class Target { OpenTier, ClosedTier, Noise } target = Target::Noise;
    std::size_t index = 0;
    std::string field;
};

ParamPath parse_param_path(const std::string& path) {
    ParamPath p;
    if (path == "noise") {
        p.target = ParamPath::Target::Noise;
        return p;
    }
    auto parse_indexed = [&](const std::string& prefix, ParamPath::Target tgt) -> bool {
        if (path.rfind(prefix + "[", 0) != 0) return false;
        auto close = path.find(']');
        if (close == std::string::npos || close + 1 >= path.size() || path[close + 1] != '.')
            throw InputError("bad parameter path '" + path + "'");
        p.target = tgt;
        p.index = std::stoul(path.substr(prefix.size() + 1, close - prefix.size() - 1));
        p.field = path.substr(close + 2);
        return true;
    };
    if (parse_indexed("open_tiers", ParamPath::Target::OpenTier)) return p;
    if (parse_indexed("closed_tiers", ParamPath::Target::ClosedTier)) return p;
    throw InputError("unresolvable parameter path '" + path + "'");
}

void apply_param(HetNetScenario& sc, const ParamPath& p, double value) {
    if (p.target == ParamPath::Target::Noise) {
        sc.noise = value;
        return;
    }
    auto& tiers = p.target == ParamPath::Target::OpenTier ? sc.open_tiers : sc.closed_tiers;
    if (p.index >= tiers.size()) throw InputError("parameter path index out of range");
    TierConfig& t = tiers[p.index];
    bool open = p.target == ParamPath::Target::OpenTier;
    if (p.field == "density") t.density = value;
    else if (p.field == "power") t.power = value;
    else if (p.field == "pathloss_exp") t.pathloss_exp = value;
    else if (open && p.field == "threshold_db") t.sinr_threshold = db_to_linear(value);
    else if (open && p.field == "bias_db") t.bias = db_to_linear(value);
    else throw InputError("unknown parameter field '" + p.field + "'");
}

struct SweepRow {
    double value = 0.0;
    std::string model;
    CoverageReport rep;
};

void write_svg(const std::string& path, const std::vector<SweepRow>& rows,
               const std::string& param) {
    // one polyline per (model, engine) series over the swept parameter
    std::map<std::string, std::vector<std::pair<double, double>>> series;
    double xmin = 1e300, xmax = -1e300;
    for (const auto& r : rows) {
        std::string key =
            r.model + "/" + (r.rep.method == CoverageMethod::Analytic ? "analytic" : "montecarlo");
        series[key].push_back({r.value, r.rep.probability});
        xmin = std::min(xmin, r.value);
        xmax = std::max(xmax, r.value);
    }
    if (xmax <= xmin) xmax = xmin + 1.0;
    const double W = 640, H = 440, L = 70, B = 50, T = 20, R = 20;
    auto sx = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
    auto sy = [&](double y) { return H - B - y * (H - T - B); };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    std::ofstream os(path);
    if (!os) throw InputError("cannot write svg file '" + path + "'");
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
       << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        double y = i / 5.0;
        os << "<text x=\"" << L - 8 << "\" y=\"" << sy(y) + 4
           << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(y) << "</text>\n";
        double x = xmin + (xmax - xmin) * i / 5.0;
        os << "<text x=\"" << sx(x) << "\" y=\"" << H - B + 16
           << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt(x) << "</text>\n";
    }
    os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12
       << "\" text-anchor=\"middle\" font-size=\"12\">" << param << "</text>\n";
    os << "<text x=\"16\" y=\"" << (T + H - B) / 2
       << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
       << (T + H - B) / 2 << ")\">coverage probability</text>\n";
    int ci = 0;
    double ly = T + 10;
    for (const auto& [key, pts] : series) {
        const char* col = colors[ci++ % 8];
        os << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& [x, y] : pts) os << sx(x) << ',' << sy(y) << ' ';
        os << "\"/>\n";
        os << "<text x=\"" << W - R - 6 << "\" y=\"" << ly << "\" text-anchor=\"end\" "
           << "font-size=\"11\" fill=\"" << col << "\">" << key << "</text>\n";
        ly += 14;
    }
    os << "</svg>\n";
}

int cmd_coverage(const Options& o, const std::string& model_name) {
    HetNetScenario sc = load_scenario(o.scenario_path);
    auto kind = parse_model(model_name);
    auto model = make_model(kind, sc);
    std::vector<std::pair<std::string, CoverageReport>> rows;
    if (o.engine == "analytic" || (o.engine == "auto" && analytic_by_default(sc, kind)))
        rows.push_back({model_name, run_engine(sc, model, true, o)});
    else if (o.engine == "montecarlo" || o.engine == "auto")
        rows.push_back({model_name, run_engine(sc, model, false, o)});
    else if (o.engine == "both") {
        rows.push_back({model_name, run_engine(sc, model, true, o)});
        rows.push_back({model_name, run_engine(sc, model, false, o)});
    } else {
        throw InputError("unknown engine '" + o.engine + "'");
    }
    std::ostringstream os;
    csv_header(os, sc.open_tiers.size(), false);
    for (const auto& [name, rep] : rows) csv_row(os, name, rep, sc.open_tiers.size());
    if (o.out_path.empty()) {
        std::cout << os.str();
    } else {
        std::ofstream f(o.out_path);
        if (!f) throw InputError("cannot write output file '" + o.out_path + "'");
        f << os.str();
    }
    return kExitOk;
}

int cmd_sweep(const Options& o, const std::string& param, double from, double to, int steps,
              const std::string& models_csv, const std::string& svg_path) {
    if (steps < 2) throw InputError("sweep needs steps >= 2");
    HetNetScenario base = load_scenario(o.scenario_path);
    ParamPath path = parse_param_path(param);
    std::vector<ConnectivityModel::Kind> kinds;
    {
        std::stringstream ss(models_csv);
        std::string tok;
        while (std::getline(ss, tok, ',')) kinds.push_back(parse_model(tok));
        if (kinds.empty()) throw InputError("no models given");
    }
    std::vector<std::string> engines;
    if (o.engine == "both") engines = {"analytic", "montecarlo"};
    else engines = {o.engine};

    struct Job {
        double value;
        ConnectivityModel::Kind kind;
        bool analytic;
    };
    std::vector<Job> jobs;
    for (int i = 0; i < steps; ++i) {
        double v = from + (to - from) * i / (steps - 1);
        for (auto kind : kinds)
            for (const auto& eng : engines) {
                bool analytic = eng == "analytic" ||
                                (eng == "auto" && analytic_by_default(base, kind));
                jobs.push_back({v, kind, analytic});
            }
    }
    std::vector<SweepRow> rows(jobs.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> numerics_failed{false};
    std::string first_error;
    std::mutex err_mutex;
    auto worker = [&]() {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) break;
            const Job& j = jobs[i];
            HetNetScenario sc = base;
            apply_param(sc, path, j.value);
            try {
                auto model = make_model(j.kind, sc);
                rows[i] = {j.value, model_name(j.kind), run_engine(sc, model, j.analytic, o)};
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (first_error.empty()) first_error = e.what();
                numerics_failed = true;
            }
        }
    };
    // Monte-Carlo engines thread internally; analytic points run concurrently.
    bool any_mc = false;
    for (const auto& j : jobs)
        if (!j.analytic) any_mc = true;
    unsigned nw = any_mc ? 1u : std::max(1u, std::thread::hardware_concurrency());
    nw = std::min<unsigned>(nw, jobs.size());
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < nw; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (numerics_failed) {
        std::filesystem::remove(o.out_path);
        throw NumericsError(first_error);
    }

    std::ofstream f(o.out_path);
    if (!f) throw InputError("cannot write output file '" + o.out_path + "'");
    csv_header(f, base.open_tiers.size(), true);
    for (const auto& r : rows) {
        f << param << ',' << fmt(r.value) << ',';
        csv_row(f, r.model, r.rep, base.open_tiers.size());
    }
    f.close();
    if (!svg_path.empty()) write_svg(svg_path, rows, param);
    return kExitOk;
}

int cmd_compare(const Options& o, const std::string& models_csv) {
    HetNetScenario sc = load_scenario(o.scenario_path);
    std::vector<ConnectivityModel::Kind> kinds;
    {
        std::stringstream ss(models_csv);
        std::string tok;
        while (std::getline(ss, tok, ',')) kinds.push_back(parse_model(tok));
        if (kinds.empty()) throw InputError("no models given");
    }
    std::map<ConnectivityModel::Kind, CoverageReport> mc, analytic;
    for (auto kind : kinds) {
        auto model = make_model(kind, sc);
        mc[kind] = run_engine(sc, model, false, o);
        if (analytic_by_default(sc, kind)) {
            try {
                analytic[kind] = run_engine(sc, model, true, o);
            } catch (const std::exception&) {
                // analytic path unavailable for this configuration
            }
        }
    }
    std::ostringstream os;
    os << "model,engine,probability,stderr\n";
    for (auto kind : kinds) {
        std::string name = model_name(kind);
        if (analytic.count(kind))
            os << name << ",analytic," << fmt(analytic[kind].probability) << ','
               << fmt(analytic[kind].stderr_est) << "\n";
        os << name << ",montecarlo," << fmt(mc[kind].probability) << ','
           << fmt(mc[kind].stderr_est) << "\n";
    }
    auto have = [&](ConnectivityModel::Kind k) { return mc.count(k) > 0; };
    auto flag = [&](const std::string& what, bool pass) {
        os << "check," << what << ",," << (pass ? "PASS" : "FAIL") << "\n";
    };
    using K = ConnectivityModel::Kind;
    if (have(K::MaxSinr) && have(K::NearestBs))
        flag("maxsinr>=nearest",
             mc[K::MaxSinr].probability >=
                 mc[K::NearestBs].probability - 3.0 * (mc[K::MaxSinr].stderr_est +
                                                       mc[K::NearestBs].stderr_est));
    if (all_beta_ge1(sc)) {
        if (have(K::MaxSinr) && have(K::Mirp))
            flag("maxsinr==mirp(beta>=1)",
                 std::abs(mc[K::MaxSinr].probability - mc[K::Mirp].probability) <=
                     3.0 * (mc[K::MaxSinr].stderr_est + mc[K::Mirp].stderr_est) + 1e-12);
        if (have(K::NearestBs) && have(K::Mbrp))
            flag("nearest==mbrp(beta>=1)",
                 std::abs(mc[K::NearestBs].probability - mc[K::Mbrp].probability) <=
                     3.0 * (mc[K::NearestBs].stderr_est + mc[K::Mbrp].stderr_est) + 1e-12);
    }
    if (o.out_path.empty()) {
        std::cout << os.str();
    } else {
        std::ofstream f(o.out_path);
        if (!f) throw InputError("cannot write output file '" + o.out_path + "'");
        f << os.str();
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coverage analysis for K-tier Poisson cellular networks"};
    app.require_subcommand(1);

    Options o;
    std::string model_name_opt = "mirp", models_csv = "maxsinr,nearest,mirp,mbrp";
    std::string param;
    double from = 0.0, to = 0.0;
    int steps = 2;
    std::string svg_path;

    auto add_common = [&](CLI::App* cmd, bool needs_out) {
        cmd->add_option("scenario", o.scenario_path, "scenario JSON file")->required();
        cmd->add_option("--engine", o.engine, "auto|analytic|montecarlo|both");
        cmd->add_option("--trials", o.trials, "Monte-Carlo trial count");
        cmd->add_option("--seed", o.seed, "Monte-Carlo seed");
        cmd->add_option("--disk-radius", o.disk_radius, "fixed guard radius (0 = auto)");
        cmd->add_option("--omega-max", o.quad.omega_max, "frequency-integral truncation cap");
        cmd->add_option("--tolerance", o.quad.radial_rel_tol, "quadrature relative tolerance");
        auto* out = cmd->add_option("--out", o.out_path, "output file");
        if (needs_out) out->required();
    };

    auto* cov = app.add_subcommand("coverage", "evaluate one scenario");
    add_common(cov, false);
    cov->add_option("--model", model_name_opt, "maxsinr|nearest|mirp|mbrp");

    auto* sw = app.add_subcommand("sweep", "sweep a parameter, write CSV");
    add_common(sw, true);
    sw->add_option("--param", param, "e.g. open_tiers[0].threshold_db")->required();
    sw->add_option("--from", from, "sweep start")->required();
    sw->add_option("--to", to, "sweep end")->required();
    sw->add_option("--steps", steps, "number of points (>= 2)")->required();
    sw->add_option("--models", models_csv, "comma-separated model list");
    sw->add_option("--svg", svg_path, "also render the sweep to this SVG file");

    auto* cmp = app.add_subcommand("compare", "model comparison table");
    add_common(cmp, false);
    cmp->add_option("--models", models_csv, "comma-separated model list");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? kExitInput : kExitOk;
    }

    try {
        o.quad.validate();
        if (cov->parsed()) return cmd_coverage(o, model_name_opt);
        if (sw->parsed()) return cmd_sweep(o, param, from, to, steps, models_csv, svg_path);
        if (cmp->parsed()) return cmd_compare(o, models_csv);
    } catch (const NumericsError& e) {
        std::cerr << "error: numerical non-convergence: " << e.what() << "\n";
        return kExitNumerics;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitOk;
}
