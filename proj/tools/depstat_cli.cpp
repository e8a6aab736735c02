// depstat: dependence-structure analytics for return panels.
//
// Subcommands map one-to-one onto the pipeline stages: predict (analytic
// curves), simulate (synthetic panels), pairscan, bins, profile, ewma,
// rolling, elliptest. All outputs are deterministic given --seed and
// independent of --threads.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "depstat/estimators.hpp"
#include "depstat/models.hpp"
#include "depstat/panel.hpp"
#include "depstat/samplers.hpp"
#include "depstat/special.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v) {
    if (std::isnan(v)) return "";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

/// Writes to `<path>.tmp` and renames on commit so failures never leave a
/// partial output behind.
class AtomicWriter {
public:
    explicit AtomicWriter(const std::string& path)
        : path_(path), tmp_(path + ".tmp"), out_(tmp_, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot open output file " + tmp_);
    }
    ~AtomicWriter() {
        if (!committed_) {
            out_.close();
            std::error_code ec;
            fs::remove(tmp_, ec);
        }
    }
    std::ostream& stream() { return out_; }
    void commit() {
        out_.flush();
        if (!out_) throw std::runtime_error("write failure on " + tmp_);
        out_.close();
        fs::rename(tmp_, path_);
        committed_ = true;
    }

private:
    std::string path_, tmp_;
    std::ofstream out_;
    bool committed_ = false;
};

std::vector<double> parse_grid(const std::string& spec) {
    double lo, hi, step;
    char c1, c2;
    std::istringstream ss(spec);
    if (!(ss >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' ||
        !(step > 0) || hi < lo)
        throw CLI::ValidationError("grid", "expected lo:hi:step with step > 0");
    std::vector<double> g;
    for (int k = 0;; ++k) {
        const double v = lo + k * step;
        if (v > hi + 1e-12) break;
        g.push_back(std::min(v, hi));
    }
    return g;
}

struct ModelFlags {
    std::string name = "gaussian";
    double nu = 5.0, s = 0.4, c = 1.0, r = 0.0, theta = 1.0;
    double kappa1 = 0.0, kappa2 = 1.0;

    void attach(CLI::App* app) {
        app->add_option("--model", name,
                        "model family: gaussian|student|lognormal|pseudo|frank|"
                        "gumbel|toy")
            ->capture_default_str();
        app->add_option("--nu", nu, "Student degrees of freedom")->capture_default_str();
        app->add_option("--s", s, "log-vol standard deviation")->capture_default_str();
        app->add_option("--c", c, "log-vol correlation (pseudo)")->capture_default_str();
        app->add_option("--r", r, "residual correlation (pseudo)")->capture_default_str();
        app->add_option("--theta", theta, "Archimedean parameter")->capture_default_str();
        app->add_option("--kappa1", kappa1, "common-factor excess kurtosis (toy)")
            ->capture_default_str();
        app->add_option("--kappa2", kappa2, "spread-factor excess kurtosis (toy)")
            ->capture_default_str();
    }

    depstat::models::ModelSpec build() const {
        using depstat::models::Family;
        using depstat::models::ModelSpec;
        switch (depstat::models::family_from_name(name)) {
            case Family::Gaussian:
                return ModelSpec::gaussian();
            case Family::Student:
                return ModelSpec::student(nu);
            case Family::LogNormalVol:
                return ModelSpec::lognormal_vol(s);
            case Family::PseudoElliptical:
                return ModelSpec::pseudo_elliptical(r, c, s);
            case Family::Frank:
                return ModelSpec::frank(theta);
            case Family::Gumbel:
                return ModelSpec::gumbel(theta);
            case Family::TwoFactorToy:
                return ModelSpec::two_factor_toy(kappa1, kappa2);
        }
        throw CLI::ValidationError("--model", "unknown family " + name);
    }
};

depstat::models::ModelSpec parse_overlay(const std::string& spec) {
    using depstat::models::ModelSpec;
    const auto colon = spec.find(':');
    const std::string name = spec.substr(0, colon);
    const double arg = colon == std::string::npos
                           ? 0.0
                           : std::stod(spec.substr(colon + 1));
    using depstat::models::Family;
    switch (depstat::models::family_from_name(name)) {
        case Family::Gaussian:
            return ModelSpec::gaussian();
        case Family::Student:
            return ModelSpec::student(arg);
        case Family::LogNormalVol:
            return ModelSpec::lognormal_vol(arg);
        default:
            throw CLI::ValidationError("--overlay",
                                       "overlays support gaussian, student:<nu>, "
                                       "lognormal:<s>");
    }
}

double model_copula(const depstat::models::ModelSpec& m, double rho, double u,
                    double v) {
    using depstat::models::Family;
    switch (m.family) {
        case Family::Gaussian:
            return depstat::num::gaussian_copula(u, v, rho);
        case Family::Student:
            return depstat::num::student_copula(u, v, rho, m.nu);
        case Family::Frank:
        case Family::Gumbel:
            return depstat::models::archimedean_copula(m.family, m.theta, u, v);
        default:
            throw std::domain_error("no copula evaluator for this family");
    }
}

// ---- stage CSV schemas ----

const char* kPairscanHeader =
    "asset_i,asset_j,t_overlap,rho,rho_sign,zeta1,zeta2,kendall,tau_uu,tau_ll,"
    "tau_ul,tau_lu,cstar,residual,z";

void write_pairscan_csv(const std::vector<depstat::panel::PairObservables>& rows,
                        std::ostream& out) {
    out << kPairscanHeader << '\n';
    for (const auto& o : rows) {
        out << o.asset_i << ',' << o.asset_j << ',' << o.t_overlap << ','
            << fmt(o.rho) << ',' << fmt(o.rho_sign) << ',' << fmt(o.zeta1) << ','
            << fmt(o.zeta2) << ',' << fmt(o.kendall) << ',' << fmt(o.tau_uu) << ','
            << fmt(o.tau_ll) << ',' << fmt(o.tau_ul) << ',' << fmt(o.tau_lu) << ','
            << fmt(o.cstar) << ',' << fmt(o.residual) << ','
            << (o.z ? fmt(*o.z) : "") << '\n';
    }
}

json pairscan_json(const std::vector<depstat::panel::PairObservables>& rows) {
    json arr = json::array();
    for (const auto& o : rows) {
        json r = {{"asset_i", o.asset_i}, {"asset_j", o.asset_j},
                  {"t_overlap", o.t_overlap}, {"rho", o.rho},
                  {"rho_sign", o.rho_sign}, {"zeta1", o.zeta1},
                  {"zeta2", o.zeta2}, {"kendall", o.kendall},
                  {"tau_uu", o.tau_uu}, {"tau_ll", o.tau_ll},
                  {"tau_ul", o.tau_ul}, {"tau_lu", o.tau_lu},
                  {"cstar", o.cstar}, {"residual", o.residual}};
        if (o.z) r["z"] = *o.z; else r["z"] = nullptr;
        arr.push_back(std::move(r));
    }
    return arr;
}

std::vector<depstat::panel::PairObservables> read_pairscan_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty pairscan input");
    if (line.size() && line.back() == '\r') line.pop_back();
    {
        std::istringstream hs(line);
        std::string col;
        const std::string expect = kPairscanHeader;
        std::istringstream es(expect);
        std::string ecol;
        while (std::getline(es, ecol, ',')) {
            if (!std::getline(hs, col, ',') || col != ecol)
                throw std::runtime_error("pairscan input: missing column " + ecol);
        }
    }
    std::vector<depstat::panel::PairObservables> rows;
    while (std::getline(in, line)) {
        if (line.size() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        while (cells.size() < 15) cells.push_back("");
        depstat::panel::PairObservables o;
        o.asset_i = cells[0];
        o.asset_j = cells[1];
        o.t_overlap = std::stoull(cells[2]);
        o.rho = std::stod(cells[3]);
        o.rho_sign = std::stod(cells[4]);
        o.zeta1 = std::stod(cells[5]);
        o.zeta2 = std::stod(cells[6]);
        o.kendall = std::stod(cells[7]);
        o.tau_uu = std::stod(cells[8]);
        o.tau_ll = std::stod(cells[9]);
        o.tau_ul = std::stod(cells[10]);
        o.tau_lu = std::stod(cells[11]);
        o.cstar = std::stod(cells[12]);
        o.residual = std::stod(cells[13]);
        if (!cells[14].empty()) o.z = std::stod(cells[14]);
        rows.push_back(std::move(o));
    }
    return rows;
}

void emit(const std::string& path, const std::string& format,
          const std::function<void(std::ostream&)>& csv, const json& as_json) {
    AtomicWriter w(path);
    if (format == "json")
        w.stream() << as_json.dump(2) << '\n';
    else
        csv(w.stream());
    w.commit();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dependence-structure analytics toolkit"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::size_t min_overlap = 250;
    double p_star = 0.95;
    std::string format = "csv";
    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--seed", seed, "RNG root seed")->capture_default_str();
        sub->add_option("--threads", threads, "worker threads (0 = auto)")
            ->capture_default_str();
        sub->add_option("--min-overlap", min_overlap,
                        "minimum joint observations per pair")
            ->capture_default_str();
        sub->add_option("--p-star", p_star, "tail probability level")
            ->capture_default_str();
        sub->add_option("--format", format, "output format: csv|json")
            ->check(CLI::IsMember({"csv", "json"}))
            ->capture_default_str();
    };

    // ---- predict ----
    auto* predict = app.add_subcommand("predict", "analytic model curves");
    ModelFlags pm;
    pm.attach(predict);
    std::vector<std::string> observables;
    std::string rho_grid_spec, p_grid_spec, out_path;
    double rho_fixed = 0.0;
    bool have_rho = false;
    predict->add_option("--observable", observables,
                        "zeta1|zeta2|cstar|rho_sign|kendall|beta|tauUU_exact|"
                        "tauUU_expansion|tauUU_asymptote|delta_diag|delta_anti")
        ->required();
    predict->add_option("--rho-grid", rho_grid_spec, "rho grid lo:hi:step");
    predict->add_option("--p-grid", p_grid_spec, "probability grid lo:hi:step");
    auto* rho_opt = predict->add_option("--rho", rho_fixed, "single rho value");
    predict->add_option("--out", out_path, "output path (default stdout)");
    add_common(predict);

    // ---- simulate ----
    auto* simulate = app.add_subcommand("simulate", "synthetic return panel");
    ModelFlags sm;
    sm.attach(simulate);
    std::size_t sim_n = 2, sim_t = 1000;
    double sim_rho = 0.0;
    std::string corr_path, sim_out;
    simulate->add_option("--n", sim_n, "number of assets")->capture_default_str();
    simulate->add_option("--t", sim_t, "number of dates")->capture_default_str();
    simulate->add_option("--rho", sim_rho, "one-factor off-diagonal correlation")
        ->capture_default_str();
    simulate->add_option("--corr", corr_path,
                         "correlation matrix CSV (N rows of N values)");
    simulate->add_option("--out", sim_out, "output panel CSV")->required();
    add_common(simulate);

    // ---- pairscan ----
    auto* scan = app.add_subcommand("pairscan", "per-pair dependence observables");
    std::string scan_in, scan_out;
    scan->add_option("--in", scan_in, "input panel CSV")->required();
    scan->add_option("--out", scan_out, "output path")->required();
    add_common(scan);

    // ---- bins ----
    auto* bins = app.add_subcommand("bins", "equal-count rho bins of a pairscan");
    std::string bins_in, bins_out;
    std::size_t n_bins = 10;
    bins->add_option("--in", bins_in, "input pairscan CSV")->required();
    bins->add_option("--out", bins_out, "output path")->required();
    bins->add_option("--n-bins", n_bins, "number of equal-count bins")
        ->capture_default_str();
    add_common(bins);

    // ---- profile ----
    auto* profile = app.add_subcommand("profile", "binned copula diagonal profiles");
    std::string prof_in, prof_out;
    std::size_t prof_bins = 10;
    profile->add_option("--in", prof_in, "input panel CSV")->required();
    profile->add_option("--out", prof_out, "output path")->required();
    profile->add_option("--n-bins", prof_bins, "number of equal-count bins")
        ->capture_default_str();
    add_common(profile);

    // ---- ewma ----
    auto* ewma = app.add_subcommand("ewma", "EWMA correlation quantile series");
    std::string ewma_in, ewma_out;
    std::size_t timescale = 125;
    std::vector<double> quantiles = {0.05, 0.25, 0.5, 0.75, 0.95};
    ewma->add_option("--in", ewma_in, "input panel CSV")->required();
    ewma->add_option("--out", ewma_out, "output path")->required();
    ewma->add_option("--timescale", timescale, "EWMA e-folding timescale in days")
        ->capture_default_str();
    ewma->add_option("--quantiles", quantiles, "cross-sectional quantile set")
        ->capture_default_str();
    add_common(ewma);

    // ---- rolling ----
    auto* rolling = app.add_subcommand("rolling", "rolling-window tail series");
    std::string roll_in, roll_out;
    std::size_t window = 250, step = 25;
    std::vector<std::string> overlay_specs;
    rolling->add_option("--in", roll_in, "input panel CSV")->required();
    rolling->add_option("--out", roll_out, "output path")->required();
    rolling->add_option("--window", window, "flat window length in days")
        ->capture_default_str();
    rolling->add_option("--step", step, "window step in days")->capture_default_str();
    rolling->add_option("--overlay", overlay_specs,
                        "model overlays, e.g. gaussian student:5 lognormal:0.4");
    add_common(rolling);

    // ---- elliptest ----
    auto* etest = app.add_subcommand("elliptest", "ellipticity test with simulated null");
    std::string et_in, et_out;
    std::size_t et_bins = 10, et_reps = 4;
    ModelFlags em;
    em.name = "student";
    em.attach(etest);
    etest->add_option("--in", et_in, "input panel CSV")->required();
    etest->add_option("--out", et_out, "output path")->required();
    etest->add_option("--n-bins", et_bins, "number of equal-count bins")
        ->capture_default_str();
    etest->add_option("--n-reps", et_reps, "pooled simulated replicas")
        ->capture_default_str();
    add_common(etest);

    CLI11_PARSE(app, argc, argv);
    have_rho = rho_opt->count() > 0;

    try {
        if (*predict) {
            const depstat::models::ModelSpec model = pm.build();
            const bool over_p = !p_grid_spec.empty();
            std::vector<double> grid;
            if (over_p)
                grid = parse_grid(p_grid_spec);
            else if (!rho_grid_spec.empty())
                grid = parse_grid(rho_grid_spec);
            else if (have_rho)
                grid = {rho_fixed};
            else
                throw CLI::ValidationError("predict",
                                           "need --rho, --rho-grid or --p-grid");
            if (over_p && !have_rho && model.is_elliptical())
                throw CLI::ValidationError("predict", "--p-grid requires --rho");

            std::ostringstream body;
            body << (over_p ? "p" : "rho");
            for (const auto& o : observables) body << ',' << o;
            body << '\n';
            for (double g : grid) {
                const double rho = over_p ? rho_fixed : g;
                const double p = over_p ? g : p_star;
                body << fmt(g);
                for (const auto& obs : observables) {
                    double v = std::numeric_limits<double>::quiet_NaN();
                    if (obs == "zeta1" || obs == "zeta2" || obs == "cstar" ||
                        obs == "rho_sign") {
                        if (model.family == depstat::models::Family::PseudoElliptical) {
                            const auto pe = depstat::models::pseudo_elliptical_predictions(
                                rho, model.c, model.s);
                            v = obs == "zeta1" ? pe.zeta1
                                : obs == "zeta2" ? pe.zeta2
                                : obs == "cstar" ? pe.cstar
                                                 : std::numeric_limits<double>::quiet_NaN();
                        } else {
                            const auto ep =
                                depstat::models::elliptical_predictions(model, rho);
                            if (obs == "zeta1") v = ep.zeta1;
                            else if (obs == "zeta2") v = ep.zeta2 ? *ep.zeta2 : v;
                            else if (obs == "cstar") v = ep.cstar;
                            else v = ep.rho_sign;
                        }
                    } else if (obs == "kendall") {
                        v = 2.0 / 3.14159265358979323846 * std::asin(rho);
                    } else if (obs == "beta") {
                        v = depstat::models::student_tail_beta(model.nu, rho);
                    } else if (obs == "tauUU_exact") {
                        v = depstat::models::model_tail_exact(model, rho, p,
                                                              depstat::models::Corner::UU);
                    } else if (obs == "tauUU_expansion") {
                        v = depstat::models::student_tail_expansion(model.nu, rho, p);
                    } else if (obs == "tauUU_asymptote") {
                        v = depstat::models::student_tail_asymptote(model.nu, rho);
                    } else if (obs == "delta_diag" || obs == "delta_anti") {
                        const double q = obs == "delta_diag" ? p : 1.0 - p;
                        v = (model_copula(model, rho, p, q) -
                             depstat::num::gaussian_copula(p, q, rho)) /
                            (p * (1.0 - p));
                    } else {
                        throw CLI::ValidationError("--observable",
                                                   "unknown observable " + obs);
                    }
                    body << ',' << fmt(v);
                }
                body << '\n';
            }
            if (out_path.empty()) {
                std::cout << body.str();
            } else {
                AtomicWriter w(out_path);
                w.stream() << body.str();
                w.commit();
            }
            return 0;
        }

        if (*simulate) {
            const depstat::models::ModelSpec model = sm.build();
            depstat::mc::CorrelationMatrix corr =
                depstat::mc::CorrelationMatrix::one_factor(sim_n, sim_rho);
            if (!corr_path.empty()) {
                std::ifstream in(corr_path);
                if (!in) throw std::runtime_error("cannot open " + corr_path);
                corr = depstat::mc::CorrelationMatrix(sim_n);
                std::string line;
                for (std::size_t i = 0; i < sim_n; ++i) {
                    if (!std::getline(in, line))
                        throw std::runtime_error("corr matrix: too few rows");
                    std::istringstream ss(line);
                    std::string cell;
                    for (std::size_t j = 0; j < sim_n; ++j) {
                        if (!std::getline(ss, cell, ','))
                            throw std::runtime_error("corr matrix: too few columns");
                        if (i != j) corr.set(i, j, std::stod(cell));
                    }
                }
                corr.cholesky();  // PSD validation up front
            }
            const depstat::panel::ReturnPanel p =
                depstat::mc::sample_panel(corr, model, sim_t, {seed, 0});
            AtomicWriter w(sim_out);
            depstat::panel::write_panel_csv(p, w.stream());
            w.commit();
            return 0;
        }

        const auto load = [&](const std::string& path) {
            std::ifstream in(path);
            if (!in) throw std::runtime_error("cannot open " + path);
            return depstat::panel::load_panel(in, min_overlap);
        };
        const depstat::panel::ScanOptions scan_opts{p_star, min_overlap, threads};

        if (*scan) {
            const auto rows = pairscan(load(scan_in), scan_opts);
            emit(scan_out, format,
                 [&](std::ostream& o) { write_pairscan_csv(rows, o); },
                 pairscan_json(rows));
            return 0;
        }

        if (*bins) {
            std::ifstream in(bins_in);
            if (!in) throw std::runtime_error("cannot open " + bins_in);
            const auto table = read_pairscan_csv(in);
            const auto curve = depstat::panel::bin_by_rho(table, n_bins);
            json arr = json::array();
            const auto csv = [&](std::ostream& o) {
                o << "bin_index,rho_lo,rho_hi,rho_mean,count";
                for (const auto& name : curve.observables)
                    o << ',' << name << "_mean," << name << "_sd";
                o << '\n';
                for (std::size_t k = 0; k < curve.count.size(); ++k) {
                    o << k << ',' << fmt(curve.rho_lo[k]) << ','
                      << fmt(curve.rho_hi[k]) << ',' << fmt(curve.rho_mean[k]) << ','
                      << curve.count[k];
                    for (const auto& st : curve.stats[k])
                        o << ',' << fmt(st.mean) << ',' << fmt(st.sd);
                    o << '\n';
                }
            };
            for (std::size_t k = 0; k < curve.count.size(); ++k) {
                json r = {{"bin_index", k}, {"rho_lo", curve.rho_lo[k]},
                          {"rho_hi", curve.rho_hi[k]},
                          {"rho_mean", curve.rho_mean[k]}, {"count", curve.count[k]}};
                for (std::size_t c = 0; c < curve.observables.size(); ++c) {
                    const auto& st = curve.stats[k][c];
                    r[curve.observables[c] + "_mean"] =
                        std::isnan(st.mean) ? json(nullptr) : json(st.mean);
                    r[curve.observables[c] + "_sd"] =
                        std::isnan(st.sd) ? json(nullptr) : json(st.sd);
                }
                arr.push_back(std::move(r));
            }
            emit(bins_out, format, csv, arr);
            return 0;
        }

        if (*profile) {
            const auto grid = depstat::est::default_profile_grid();
            const auto pbins =
                depstat::panel::profile_by_bin(load(prof_in), prof_bins, grid, scan_opts);
            json arr = json::array();
            const auto csv = [&](std::ostream& o) {
                o << "bin_index,rho_mean,p,delta_diag_mean,delta_diag_sd,"
                     "delta_anti_mean,delta_anti_sd,count\n";
                for (std::size_t k = 0; k < pbins.size(); ++k)
                    for (std::size_t g = 0; g < pbins[k].p_grid.size(); ++g)
                        o << k << ',' << fmt(pbins[k].rho_mean) << ','
                          << fmt(pbins[k].p_grid[g]) << ','
                          << fmt(pbins[k].delta_diag_mean[g]) << ','
                          << fmt(pbins[k].delta_diag_sd[g]) << ','
                          << fmt(pbins[k].delta_anti_mean[g]) << ','
                          << fmt(pbins[k].delta_anti_sd[g]) << ','
                          << pbins[k].count << '\n';
            };
            for (std::size_t k = 0; k < pbins.size(); ++k)
                for (std::size_t g = 0; g < pbins[k].p_grid.size(); ++g)
                    arr.push_back({{"bin_index", k},
                                   {"rho_mean", pbins[k].rho_mean},
                                   {"p", pbins[k].p_grid[g]},
                                   {"delta_diag_mean", pbins[k].delta_diag_mean[g]},
                                   {"delta_diag_sd", pbins[k].delta_diag_sd[g]},
                                   {"delta_anti_mean", pbins[k].delta_anti_mean[g]},
                                   {"delta_anti_sd", pbins[k].delta_anti_sd[g]},
                                   {"count", pbins[k].count}});
            emit(prof_out, format, csv, arr);
            return 0;
        }

        if (*ewma) {
            const auto series =
                depstat::panel::ewma_corr_quantiles(load(ewma_in), timescale, quantiles);
            json arr = json::array();
            const auto csv = [&](std::ostream& o) {
                o << "window_end_date,stat,value\n";
                for (std::size_t t = 0; t < series.dates.size(); ++t)
                    for (std::size_t q = 0; q < series.levels.size(); ++q)
                        o << series.dates[t] << ",q" << fmt(series.levels[q]) << ','
                          << fmt(series.values[t][q]) << '\n';
            };
            for (std::size_t t = 0; t < series.dates.size(); ++t)
                for (std::size_t q = 0; q < series.levels.size(); ++q)
                    arr.push_back({{"window_end_date", series.dates[t]},
                                   {"stat", "q" + fmt(series.levels[q])},
                                   {"value", series.values[t][q]}});
            emit(ewma_out, format, csv, arr);
            return 0;
        }

        if (*rolling) {
            std::vector<depstat::models::ModelSpec> models;
            for (const auto& s : overlay_specs) models.push_back(parse_overlay(s));
            const auto rt = depstat::panel::rolling_tail(load(roll_in), window, step,
                                                         p_star, models, scan_opts);
            json arr = json::array();
            const auto csv = [&](std::ostream& o) {
                o << "window_end_date,stat,value";
                for (const auto& ov : rt.overlays)
                    o << ",pred_" << ov.model << "_meanrho,pred_" << ov.model
                      << "_rhodist";
                o << '\n';
                for (std::size_t t = 0; t < rt.window_end_dates.size(); ++t) {
                    o << rt.window_end_dates[t] << ",tau_uu," << fmt(rt.tau_uu[t]);
                    for (const auto& ov : rt.overlays)
                        o << ',' << fmt(ov.pred_meanrho_uu[t]) << ','
                          << fmt(ov.pred_rhodist_uu[t]);
                    o << '\n';
                    o << rt.window_end_dates[t] << ",tau_ll," << fmt(rt.tau_ll[t]);
                    for (std::size_t m = 0; m < rt.overlays.size(); ++m) o << ",,";
                    o << '\n';
                }
            };
            for (std::size_t t = 0; t < rt.window_end_dates.size(); ++t) {
                json r = {{"window_end_date", rt.window_end_dates[t]},
                          {"stat", "tau_uu"},
                          {"value", rt.tau_uu[t]}};
                for (const auto& ov : rt.overlays) {
                    r["pred_" + ov.model + "_meanrho"] = ov.pred_meanrho_uu[t];
                    r["pred_" + ov.model + "_rhodist"] = ov.pred_rhodist_uu[t];
                }
                arr.push_back(std::move(r));
                arr.push_back({{"window_end_date", rt.window_end_dates[t]},
                               {"stat", "tau_ll"},
                               {"value", rt.tau_ll[t]}});
            }
            emit(roll_out, format, csv, arr);
            return 0;
        }

        if (*etest) {
            depstat::panel::ElliptestOptions opts;
            opts.n_bins = et_bins;
            opts.n_reps = et_reps;
            opts.scan = scan_opts;
            const auto rep = depstat::panel::elliptest(load(et_in), em.build(),
                                                       {seed, 0}, opts);
            json meta = {{"n_pairs", rep.n_pairs},
                         {"n_sim_pairs", rep.n_sim_pairs},
                         {"shrinkage", rep.shrinkage},
                         {"min_eigenvalue", rep.min_eigenvalue}};
            json arr = json::array();
            const auto csv = [&](std::ostream& o) {
                o << "bin_index,rho_lo,rho_hi,rho_mean,count,resid_mean,resid_sd,"
                     "z_mean,z_sd,z_count,sim_resid_mean,sim_resid_sd,sim_z_mean,"
                     "sim_z_sd,resid_dispersion_ratio,z_dispersion_ratio\n";
                for (std::size_t k = 0; k < rep.bins.size(); ++k) {
                    const auto& b = rep.bins[k];
                    o << k << ',' << fmt(b.rho_lo) << ',' << fmt(b.rho_hi) << ','
                      << fmt(b.rho_mean) << ',' << b.count << ','
                      << fmt(b.resid.mean) << ',' << fmt(b.resid.sd) << ','
                      << fmt(b.z.mean) << ',' << fmt(b.z.sd) << ',' << b.z.count
                      << ',' << fmt(b.sim_resid.mean) << ',' << fmt(b.sim_resid.sd)
                      << ',' << fmt(b.sim_z.mean) << ',' << fmt(b.sim_z.sd) << ','
                      << fmt(b.resid_dispersion_ratio) << ','
                      << fmt(b.z_dispersion_ratio) << '\n';
                }
            };
            for (std::size_t k = 0; k < rep.bins.size(); ++k) {
                const auto& b = rep.bins[k];
                arr.push_back({{"bin_index", k},
                               {"rho_lo", b.rho_lo},
                               {"rho_hi", b.rho_hi},
                               {"rho_mean", b.rho_mean},
                               {"count", b.count},
                               {"resid_mean", b.resid.mean},
                               {"resid_sd", b.resid.sd},
                               {"z_mean", b.z.mean},
                               {"z_sd", b.z.sd},
                               {"z_count", b.z.count},
                               {"sim_resid_mean", b.sim_resid.mean},
                               {"sim_resid_sd", b.sim_resid.sd},
                               {"sim_z_mean", b.sim_z.mean},
                               {"sim_z_sd", b.sim_z.sd},
                               {"resid_dispersion_ratio", b.resid_dispersion_ratio},
                               {"z_dispersion_ratio", b.z_dispersion_ratio}});
            }
            emit(et_out, format, csv, json{{"meta", meta}, {"bins", arr}});
            return 0;
        }
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
