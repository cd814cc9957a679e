// Command-line front end: one subcommand per computation, CSV for grids and
// JSON for single results. Exit status 0 ok, 1 domain/input error, 2 budget.

#include <CLI11.hpp>
#include <json.hpp>

#include <heightgrowth/adelic.hpp>
#include <heightgrowth/archimedean.hpp>
#include <heightgrowth/building.hpp>
#include <heightgrowth/counting.hpp>
#include <heightgrowth/dirichlet.hpp>
#include <heightgrowth/verify.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using json = nlohmann::ordered_json;
namespace hg = heightgrowth;

namespace {

constexpr int schema_version = 1;

/// Round to 12 significant digits so JSON output carries exactly that many.
double sig(double v) {
    if (!std::isfinite(v)) return v;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::strtod(buf, nullptr);
}

json num(double v) {
    if (std::isfinite(v)) return sig(v);
    return v > 0 ? "inf" : v < 0 ? "-inf" : "nan";
}

std::string g12(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

/// Integers that may not fit 64 bits go out as strings.
json big(const hg::BigInt& v) {
    if (v <= std::numeric_limits<std::int64_t>::max()) return v.convert_to<std::int64_t>();
    return v.str();
}

json header(const std::string& name) { return {{"schema", "heightgrowth." + name + "/" + std::to_string(schema_version)}}; }

void csv_header(std::ostream& os, const std::string& name) {
    os << "# schema: heightgrowth." << name << "/" << schema_version << "\n";
}

double env_budget(const char* name, double fallback) {
    const char* v = std::getenv(name);
    if (!v || !*v) return fallback;
    char* end = nullptr;
    const double x = std::strtod(v, &end);
    if (end == v || !(x > 0)) throw hg::DomainError(std::string("bad value for ") + name);
    return x;
}

struct Budgets {
    hg::building::EnumerationLimits classes;
    hg::dirichlet::SieveLimits sieve;
    hg::counting::EnumerationBudget cells;

    static Budgets from_env() {
        Budgets b;
        b.classes.max_classes = env_budget("HEIGHTGROWTH_MAX_CLASSES", 1e7);
        b.sieve.max_entries = static_cast<std::int64_t>(env_budget("HEIGHTGROWTH_MAX_SIEVE", 1e6));
        b.cells.max_cells = env_budget("HEIGHTGROWTH_MAX_CELLS", 1e9);
        return b;
    }
};

hg::dirichlet::Complex parse_complex(const std::string& s) {
    std::stringstream ss(s);
    double re = 0, im = 0;
    char comma = 0;
    ss >> re;
    if (!ss) throw hg::DomainError("--s: expected \"re\" or \"re,im\"");
    if (ss >> comma) {
        if (comma != ',' || !(ss >> im)) throw hg::DomainError("--s: expected \"re,im\"");
    }
    return {re, im};
}

hg::IntMatrix parse_matrix(const std::string& s) {
    std::vector<std::vector<long long>> rows;
    std::stringstream rs(s);
    for (std::string row; std::getline(rs, row, ';');) {
        std::vector<long long> r;
        std::stringstream cs(row);
        for (std::string cell; std::getline(cs, cell, ',');) {
            try {
                std::size_t used = 0;
                r.push_back(std::stoll(cell, &used));
                if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
            } catch (const std::logic_error&) {
                throw hg::DomainError("--matrix: bad entry '" + cell + "'");
            }
        }
        rows.push_back(std::move(r));
    }
    const int n = static_cast<int>(rows.size());
    hg::IntMatrix m(n, n);
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(rows[i].size()) != n) throw hg::DomainError("--matrix: must be square, rows ';' entries ','");
        for (int j = 0; j < n; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');) out.push_back(std::stod(item));
    return out;
}

void print(const json& j) { std::cout << j.dump(2) << "\n"; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Heights, buildings and lattice-point growth for PGL_d"};
    app.require_subcommand(1);
    int workers = 1;
    app.add_option("--workers", workers, "worker threads for parallel sections")->check(CLI::Range(1, 256));

    int d = 2, k = 1, dmax = 6, samples = 50, mesh = 8;
    std::int64_t p = 2, m = 1, xmax_int = 0, cutoff = 100000;
    double B = 1.0, R_max = 10.0, T = 1.0, T_max = 5.0, step = 0.1, covolume = 1.0, xmax = 8.0, eps = 0.1;
    std::string s_str = "3", matrix, variant = "pgl2", out_path, function = "xexp", eps_list = "0.1,0.05,0.01,0.005";
    double T_min = 5.0;
    bool closed_form = false, oracle = false, quick = false, full = false;

    auto* sphere = app.add_subcommand("sphere", "number of building vertices at distance k");
    auto* ball = app.add_subcommand("ball", "number of building vertices within distance k");
    for (auto* sc : {sphere, ball}) {
        sc->add_option("--d", d)->required();
        sc->add_option("--p", p)->required();
        sc->add_option("--k", k)->required()->check(CLI::NonNegativeNumber);
        sc->add_flag("--oracle", oracle, "also count by BFS enumeration");
    }
    auto* classes = app.add_subcommand("classes", "enumerate lattice classes within distance k (JSON lines)");
    classes->add_option("--d", d)->required();
    classes->add_option("--p", p)->required();
    classes->add_option("--k", k)->required()->check(CLI::NonNegativeNumber);
    classes->add_option("--out", out_path, "output file (default stdout)");

    auto* dcoeff = app.add_subcommand("dcoeff", "Dirichlet coefficients D(m)");
    dcoeff->add_option("--d", d)->required();
    auto* m_opt = dcoeff->add_option("--m", m, "single m");
    dcoeff->add_option("--xmax", xmax_int, "table for m = 1..xmax (CSV)")->excludes(m_opt);

    auto* lseries = app.add_subcommand("lseries", "Euler-product L-function value");
    lseries->add_option("--d", d);
    lseries->add_option("--s", s_str, "complex argument \"re,im\"")->required();
    lseries->add_option("--cutoff", cutoff, "prime cutoff")->check(CLI::PositiveNumber);
    lseries->add_option("--variant", variant)->check(CLI::IsMember({"pgl", "pgl2", "sl2"}));
    lseries->add_flag("--closed-form", closed_form, "also evaluate the zeta quotient (d = 2 or sl2)");

    auto* poles = app.add_subcommand("poles-table", "real parts s_2, s_3 of the rightmost poles (CSV)");
    poles->add_option("--dmax", dmax)->check(CLI::Range(2, 64));

    auto* residue = app.add_subcommand("residue", "residue at the rightmost pole");
    residue->add_option("--variant", variant)->check(CLI::IsMember({"pgl2", "sl2"}));

    auto* bvol = app.add_subcommand("ball-volume", "archimedean ball volumes (CSV)");
    bvol->add_option("--d", d);
    bvol->add_option("--B", B);
    bvol->add_option("--Rmax", R_max)->check(CLI::PositiveNumber);
    bvol->add_option("--samples", samples)->check(CLI::Range(1, 1000000));
    bvol->add_option("--mesh", mesh, "Gauss nodes per direction")->check(CLI::Range(3, 64));

    auto* badelic = app.add_subcommand("ball-adelic", "adelic ball volume b(T) (CSV)");
    badelic->add_option("--d", d);
    badelic->add_option("--B", B);
    badelic->add_option("--Tmax", T_max)->check(CLI::PositiveNumber);
    badelic->add_option("--step", step)->check(CLI::PositiveNumber);

    auto* height = app.add_subcommand("height", "global height of a primitive integer matrix (JSON)");
    height->add_option("--matrix", matrix, "rows separated by ';', entries by ','")->required();
    height->add_option("--B", B);

    auto* predict = app.add_subcommand("predict", "leading-term prediction for N(T) (JSON)");
    predict->add_option("--d", d);
    predict->add_option("--B", B)->required();
    predict->add_option("--T", T)->required();
    predict->add_option("--covolume", covolume)->check(CLI::PositiveNumber);
    predict->add_option("--cutoff", cutoff)->check(CLI::PositiveNumber);

    auto* count = app.add_subcommand("count", "exact pi(x) in PGL_2(Q) against the predictions (CSV)");
    count->add_option("--xmax", xmax)->check(CLI::PositiveNumber);
    count->add_option("--step", step, "x grid step (default 0.5)")->default_val(0.5);
    count->add_option("--B", B);
    count->add_option("--covolume", covolume)->check(CLI::PositiveNumber);
    count->add_option("--eps", eps, "sandwich shift");
    count->add_option("--csv", out_path, "output file (default stdout)");

    auto* regular = app.add_subcommand("regularity", "regularity verdict for a model ball-volume function (JSON)");
    regular->add_option("--function", function)->check(CLI::IsMember({"xexp", "floor-exp", "tree", "adelic"}));
    regular->add_option("--eps", eps_list, "comma-separated shifts");
    regular->add_option("--Tmin", T_min);
    regular->add_option("--Tmax", T_max);
    regular->add_option("--B", B);

    auto* persist = app.add_subcommand("persistence", "convolution of D_2(m)/m^B masses with e^{2T} (JSON)");
    persist->add_option("--T", T)->required()->check(CLI::PositiveNumber);
    persist->add_option("--B", B);

    auto* verify = app.add_subcommand("verify", "run the acceptance checks");
    auto* q = verify->add_flag("--quick", quick, "fast tier (default)");
    verify->add_flag("--full", full, "extended ranges")->excludes(q);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        const Budgets budget = Budgets::from_env();

        if (*sphere || *ball) {
            const hg::building::BuildingParams bp(d, p);
            const bool is_sphere = sphere->parsed();
            json j = header(is_sphere ? "sphere" : "ball");
            j["d"] = d;
            j["p"] = p;
            j["k"] = k;
            j["size"] = big(is_sphere ? hg::building::sphere_size(bp, k) : hg::building::ball_size(bp, k));
            if (oracle) {
                const auto hist = hg::building::distance_histogram(hg::building::enumerate_classes(bp, k, budget.classes));
                std::int64_t n = 0;
                for (int i = 0; i <= k && i < static_cast<int>(hist.size()); ++i)
                    if (!is_sphere || i == k) n += hist[i];
                j["bfs"] = n;
            }
            print(j);
        } else if (*classes) {
            const hg::building::BuildingParams bp(d, p);
            const auto cls = hg::building::enumerate_classes(bp, k, budget.classes);
            if (out_path.empty()) {
                hg::building::write_classes_jsonl(std::cout, cls, p);
            } else {
                std::ofstream os(out_path);
                if (!os) throw hg::DomainError("cannot open " + out_path);
                hg::building::write_classes_jsonl(os, cls, p);
            }
        } else if (*dcoeff) {
            if (xmax_int > 0) {
                const auto table = hg::dirichlet::coeff_sieve(d, xmax_int, budget.sieve);
                csv_header(std::cout, "dcoeff");
                std::cout << "m,D\n";
                for (std::int64_t i = 1; i <= xmax_int; ++i) std::cout << i << "," << table.at(i).str() << "\n";
            } else {
                json j = header("dcoeff");
                j["d"] = d;
                j["m"] = m;
                j["D"] = big(hg::dirichlet::coeff_D(d, m));
                print(j);
            }
        } else if (*lseries) {
            const auto s = parse_complex(s_str);
            const bool sl2 = variant == "sl2";
            const auto v = sl2 ? hg::dirichlet::L_euler_sl2(s, cutoff) : hg::dirichlet::L_euler(d, s, cutoff);
            json j = header("lseries");
            j["variant"] = sl2 ? "sl2" : "pgl";
            if (!sl2) j["d"] = d;
            j["s"] = {num(s.real()), num(s.imag())};
            j["cutoff"] = cutoff;
            j["value"] = {num(v.value.real()), num(v.value.imag())};
            j["log_truncation_bound"] = num(v.truncation_bound);
            if (closed_form) {
                if (!sl2 && d != 2) throw hg::DomainError("--closed-form: only available for d = 2 or the sl2 variant");
                const auto c = sl2 ? hg::dirichlet::L_closed_sl2(s) : hg::dirichlet::L_closed_pgl2(s);
                j["closed_form"] = {num(c.real()), num(c.imag())};
                j["relative_difference"] = num(std::abs(v.value / c - 1.0));
            }
            print(j);
        } else if (*poles) {
            csv_header(std::cout, "poles-table");
            std::cout << "n,s_2,s_3\n";
            for (int n = 2; n <= dmax; ++n) {
                char buf[96];
                std::snprintf(buf, sizeof buf, "%d,%.10f,%.10f\n", n, hg::dirichlet::pole_abscissa(n, 2),
                              hg::dirichlet::pole_abscissa(n, 3));
                std::cout << buf;
            }
        } else if (*residue) {
            const auto r = hg::dirichlet::residue_estimate(variant == "sl2" ? hg::dirichlet::Variant::sl2
                                                                            : hg::dirichlet::Variant::pgl2);
            json j = header("residue");
            j["variant"] = variant;
            j["pole"] = num(r.pole);
            j["direct"] = num(r.direct);
            j["extrapolated"] = num(r.extrapolated);
            j["difference"] = num(r.difference);
            j["at_pole_plus_1e-3"] = num(r.naive_1e3);
            j["stated"] = num(r.stated);
            print(j);
        } else if (*bvol) {
            csv_header(std::cout, "ball-volume");
            std::cout << "R,volume,log_volume\n";
            std::vector<hg::archimedean::GrowthSample> pts;
            for (int i = 1; i <= samples; ++i) {
                const double R = R_max * i / samples;
                const double v = hg::archimedean::ball_volume_numeric(d, B, R, mesh);
                pts.push_back({R, v});
                std::cout << g12(R) << "," << g12(v) << "," << g12(std::log(v)) << "\n";
            }
            if (pts.size() >= 5 && R_max - R_max / samples >= 2.0) {
                const auto fit = hg::archimedean::growth_exponent_fit(pts);
                std::cout << "# fit: slope=" << g12(fit.slope) << " poly_degree=" << g12(fit.poly_degree)
                          << " (upper half of samples; stated exponent B=" << g12(B) << ")\n";
            }
        } else if (*badelic) {
            hg::adelic::AdelicOptions opt;
            opt.workers = workers;
            opt.sieve = budget.sieve;
            const hg::adelic::AdelicBall b(d, B, T_max + 0.01, opt);
            csv_header(std::cout, "ball-adelic");
            std::cout << "T,b\n";
            const auto n = static_cast<long long>(std::floor(T_max / step + 1e-9));
            for (long long i = 1; i <= n; ++i) {
                const double t = static_cast<double>(i) * step;
                std::cout << g12(t) << "," << g12(b(t)) << "\n";
            }
        } else if (*height) {
            const auto hp = hg::adelic::global_height(parse_matrix(matrix), B);
            json j = header("height");
            json fin = json::object();
            for (const auto& [prime, e] : hp.finite_exponents) fin[std::to_string(prime)] = e;
            j["B"] = num(B);
            j["finite_exponents"] = fin;
            j["h_fin"] = big(hp.h_fin);
            j["h_inf"] = num(hp.h_inf);
            j["h"] = num(hp.h);
            j["log_h"] = num(hp.log_h);
            if (hp.ill_conditioned) j["warning"] = "sigma_min/sigma_max < 1e-14";
            print(j);
        } else if (*predict) {
            const auto pr = hg::adelic::prediction_N(d, B, T, covolume, cutoff);
            json j = header("predict");
            j["d"] = d;
            j["B"] = num(B);
            j["T"] = num(T);
            j["covolume"] = num(covolume);
            j["simplex_area"] = num(pr.simplex_area);
            j["euler_constant"] = num(pr.euler_constant);
            j["euler_log_truncation_bound"] = num(pr.euler_bound);
            j["predictions"] = json::array({{{"label", pr.stated.label}, {"exponent", num(pr.stated.exponent)},
                                             {"value", num(pr.stated.value)}},
                                            {{"label", pr.measured.label}, {"exponent", num(pr.measured.exponent)},
                                             {"value", num(pr.measured.value)}}});
            if (pr.below_threshold) j["warning"] = "B <= s_2(d): outside the range where the asymptotic is claimed";
            print(j);
        } else if (*count) {
            std::vector<double> xs;
            for (double x = step; x <= xmax + 1e-9; x += step) xs.push_back(x);
            if (xs.empty()) xs.push_back(xmax);
            const auto rep = hg::counting::compare_report(xs, B, covolume, eps, workers, budget.cells);
            std::ofstream file;
            if (!out_path.empty()) {
                file.open(out_path);
                if (!file) throw hg::DomainError("cannot open " + out_path);
            }
            std::ostream& os = out_path.empty() ? std::cout : file;
            csv_header(os, "count");
            os << "# B=" << g12(B) << " covolume=" << g12(covolume) << " eps=" << g12(eps)
               << " entry_bound=" << rep.entry_bound_used << " I_convA=" << g12(rep.integral_convA)
               << " I_convB=" << g12(rep.integral_convB) << "\n";
            os << "x,pi,predicted_convA,predicted_convB,lower_sandwich,upper_sandwich\n";
            for (const auto& r : rep.rows) {
                os << g12(r.x) << "," << r.pi << "," << g12(r.predicted_convA) << "," << g12(r.predicted_convB) << ","
                   << g12(r.lower_sandwich) << "," << g12(r.upper_sandwich) << "\n";
                if (r.ties) std::cerr << "tie: " << r.ties << " heights within 1e-9 of x=" << g12(r.x) << "\n";
            }
        } else if (*regular) {
            const auto eps_v = parse_list(eps_list);
            double min_eps = INFINITY, max_eps = 0;
            for (double e : eps_v) {
                min_eps = std::min(min_eps, e);
                max_eps = std::max(max_eps, e);
            }
            if (!(min_eps > 0.0)) throw hg::DomainError("--eps: shifts must be positive");
            if (!(T_max > T_min && T_min - max_eps >= 0.0)) throw hg::DomainError("need 0 <= Tmin - max(eps) < Tmax");
            const double h = min_eps / 10.0;
            hg::adelic::SampledFunction f;
            const double lo = T_min - max_eps, hi = T_max + max_eps;
            if (function == "adelic") {
                hg::adelic::AdelicOptions opt;
                opt.workers = workers;
                opt.sieve = budget.sieve;
                opt.step = h;
                const auto series = hg::adelic::ball_volume_series(2, B, lo, hi, opt);
                f = hg::adelic::to_sampled(series);
            } else {
                std::function<double(double)> fn;
                if (function == "xexp") fn = [](double x) { return x * std::exp(2 * x); };
                if (function == "floor-exp") fn = [](double x) { return std::exp(std::floor(x + 1e-9)); };
                if (function == "tree") fn = [](double x) { return static_cast<double>(hg::adelic::tree_ball(2, x)); };
                f = hg::adelic::sample_function(fn, lo, hi, h);
            }
            std::vector<double> ts;
            for (double t = f.t0; t <= hi + 1e-12; t += f.step)
                if (t >= T_min - 1e-12 && t <= T_max + 1e-12) ts.push_back(t);
            const auto rep = hg::adelic::regularity_report(f, eps_v, ts);
            json j = header("regularity");
            j["function"] = function;
            json rows = json::array();
            for (const auto& r : rep.rows)
                rows.push_back({{"eps", num(r.eps)}, {"liminf_lower", num(r.liminf_lower)},
                                {"limsup_upper", num(r.limsup_upper)}, {"gap", num(r.gap)}});
            j["rows"] = rows;
            j["gap_shrinks"] = rep.gap_shrinks;
            j["gap"] = num(rep.gap);
            j["verdict"] = hg::adelic::to_string(rep.verdict);
            j["thresholds"] = {{"regular_gap", 0.02}, {"non_regular_gap", 0.1}};
            print(j);
        } else if (*persist) {
            const std::int64_t x = hg::adelic::floor_exp(T);
            const auto table = hg::dirichlet::coeff_sieve(2, x, budget.sieve);
            std::vector<hg::adelic::PointMass> mu;
            for (std::int64_t i = 1; i <= x; ++i)
                mu.push_back({std::log(static_cast<double>(i)),
                              hg::arith::to_double(table.at(i)) * std::pow(static_cast<double>(i), -B)});
            const double C = hg::dirichlet::L_closed_pgl2(hg::dirichlet::Complex(B + 2.0, 0.0)).real();
            const hg::adelic::MeasurePair pair(std::move(mu), [](double t) { return std::exp(2 * t); }, T, 0.0, 2.0, C);
            const auto r = hg::adelic::persistence_check(pair, T);
            json j = header("persistence");
            j["T"] = num(T);
            j["B"] = num(B);
            j["C"] = num(r.C);
            j["d_T"] = num(r.d_T);
            j["ratio"] = num(r.ratio);
            print(j);
        } else if (*verify) {
            hg::verify::VerifyOptions opt;
            opt.tier = full ? hg::verify::Tier::full : hg::verify::Tier::quick;
            opt.workers = workers;
            const auto results = hg::verify::run_all(opt);
            std::cout << hg::verify::format_report(results, opt);
            bool all = true;
            for (const auto& r : results) {
                all = all && r.passed;
                std::cerr << "criterion " << r.id << ": " << g12(r.seconds) << " s\n";
            }
            return all ? 0 : 1;
        }
    } catch (const hg::BudgetError& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return 2;
    } catch (const hg::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const hg::ConvergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: malformed number (" << e.what() << ")\n";
        return 1;
    }
    return 0;
}
