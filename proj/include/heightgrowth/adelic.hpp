#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "archimedean.hpp"
#include "arith.hpp"
#include "building.hpp"
#include "dirichlet.hpp"
#include "errors.hpp"
#include "int_matrix.hpp"
#include "parallel.hpp"

namespace heightgrowth::adelic {

// ---------------------------------------------------------------------------
// Global heights

struct HeightProfile {
    std::map<std::int64_t, int> finite_exponents;  // primes with d_p > 0
    BigInt h_fin;
    double h_inf;
    double h;
    double log_h;
    bool ill_conditioned;
};

inline archimedean::RealMatrix to_real(const IntMatrix& m) {
    archimedean::RealMatrix r(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) r(i, j) = arith::to_double(m(i, j));
    return r;
}

/// h = prod_p p^{d_p} * e^{d_inf} for a primitive integer representative.
inline HeightProfile global_height(const IntMatrix& m, double B) {
    if (m.rows() != m.cols() || m.rows() < 2) throw DomainError("global_height: need a square matrix, d >= 2");
    const BigInt det = determinant(m);
    if (det == 0) throw SingularMatrixError();
    if (m.content() != 1) throw DomainError("global_height: matrix is not primitive (entry gcd != 1)");

    HeightProfile hp{{}, BigInt(1), 1.0, 1.0, 0.0, false};
    double log_fin = 0.0;
    for (const auto& [p, k] : arith::factorize(BigInt(abs(det)))) {
        const int dp = building::building_distance(m, p);
        if (dp == 0) continue;
        hp.finite_exponents[p] = dp;
        hp.h_fin *= arith::ipow(p, static_cast<unsigned>(dp));
        log_fin += dp * std::log(static_cast<double>(p));
    }
    const auto inf = archimedean::archimedean_height(to_real(m), B);
    hp.h_inf = inf.value;
    hp.ill_conditioned = inf.ill_conditioned;
    hp.log_h = log_fin + inf.log_value;
    hp.h = std::exp(hp.log_h);
    return hp;
}

// ---------------------------------------------------------------------------
// Ball volumes

/// b^inf(t) on the nodes t_k = k * step of [0, t_max], linear in between.
class ArchimedeanBallTable {
public:
    ArchimedeanBallTable(int d, double B, double t_max, double step = 1e-3, int mesh = 8)
        : d_(d), B_(B), step_(step), mesh_(mesh) {
        if (!(step > 0.0)) throw DomainError("ArchimedeanBallTable: step must be positive");
        if (t_max < 0.0) throw DomainError("ArchimedeanBallTable: t_max must be >= 0");
        const auto n = static_cast<std::size_t>(std::ceil(t_max / step)) + 2;
        nodes_.resize(n);
        nodes_[0] = 0.0;
        for (std::size_t k = 1; k < n; ++k)
            nodes_[k] = archimedean::ball_volume_numeric(d, B, static_cast<double>(k) * step, mesh);
    }

    int d() const { return d_; }
    double B() const { return B_; }
    double step() const { return step_; }
    int mesh() const { return mesh_; }
    double t_max() const { return static_cast<double>(nodes_.size() - 1) * step_; }
    double node(std::size_t k) const { return nodes_.at(k); }
    std::size_t size() const { return nodes_.size(); }

    double operator()(double t) const {
        if (t <= 0.0) return 0.0;
        const double u = t / step_;
        const auto k = static_cast<std::size_t>(u);
        if (k + 1 >= nodes_.size()) throw DomainError("ArchimedeanBallTable: t beyond the tabulated range");
        const double f = u - static_cast<double>(k);
        return nodes_[k] * (1.0 - f) + nodes_[k + 1] * f;
    }

private:
    int d_;
    double B_;
    double step_;
    int mesh_;
    std::vector<double> nodes_;
};

struct AdelicOptions {
    double step = 1e-3;
    int mesh = 8;
    int workers = 1;
    dirichlet::SieveLimits sieve{};
};

/// Largest integer m with log m <= T.
inline std::int64_t floor_exp(double T) {
    if (T < 0.0) return 0;
    auto m = static_cast<std::int64_t>(std::floor(std::exp(T)));
    while (m >= 1 && std::log(static_cast<double>(m)) > T) --m;
    while (std::log(static_cast<double>(m + 1)) <= T) ++m;
    return m;
}

struct BallComponent {
    std::int64_t m;
    double D;
    double b_inf;  // b^inf(T - log m)
};

/// b(T) = sum_{m <= e^T} D(m) b^inf(T - log m) as an explicit sum. The m = 1
/// term is the quadrature value itself; the others use the table.
class AdelicBall {
public:
    AdelicBall(int d, double B, double T_max, const AdelicOptions& opt = {})
        : opt_(opt),
          table_(d, B, T_max, opt.step, opt.mesh),
          coeffs_(dirichlet::coeff_sieve(d, std::max<std::int64_t>(1, floor_exp(T_max)), opt.sieve)) {
        const auto& v = coeffs_.values();
        D_.resize(v.size());
        for (std::size_t m = 1; m < v.size(); ++m) D_[m] = arith::to_double(v[m]);
        logs_.resize(v.size());
        for (std::size_t m = 1; m < v.size(); ++m) logs_[m] = std::log(static_cast<double>(m));
    }

    const ArchimedeanBallTable& table() const { return table_; }
    double T_max() const { return std::min(table_.t_max(), std::log(static_cast<double>(coeffs_.x_max() + 1))); }

    double operator()(double T) const {
        if (T <= 0.0) return 0.0;
        const std::int64_t x = floor_exp(T);
        if (x > coeffs_.x_max() || T > table_.t_max()) throw DomainError("adelic_ball_volume: T beyond the prepared range");
        const double head = archimedean::ball_volume_numeric(table_.d(), table_.B(), T, table_.mesh());
        if (x < 2) return head;
        constexpr std::size_t chunks = 64;
        std::vector<double> part(chunks, 0.0);
        const auto n = static_cast<std::size_t>(x - 1);
        parallel::for_chunks(chunks, opt_.workers, [&](std::size_t c) {
            const auto [lo, hi] = parallel::chunk_range(n, chunks, c);
            arith::CompensatedSum acc;
            for (std::size_t i = lo; i < hi; ++i) {
                const std::size_t m = i + 2;
                acc.add(D_[m] * table_(T - logs_[m]));
            }
            part[c] = acc.value();
        });
        arith::CompensatedSum total;
        total.add(head);
        for (double v : part) total.add(v);
        return total.value();
    }

    std::vector<BallComponent> components(double T) const {
        std::vector<BallComponent> out;
        const std::int64_t x = floor_exp(T);
        if (x > coeffs_.x_max()) throw DomainError("adelic_ball_volume: T beyond the prepared range");
        for (std::int64_t m = 1; m <= x; ++m) {
            const auto i = static_cast<std::size_t>(m);
            out.push_back({m, D_[i], m == 1 ? archimedean::ball_volume_numeric(table_.d(), table_.B(), T, table_.mesh())
                                            : table_(T - logs_[i])});
        }
        return out;
    }

    /// b on the nodes j*step for T0 <= j*step <= T1. Each D(m) is split
    /// linearly between the two nodes around log m, which turns the sum into
    /// a discrete convolution against the b^inf table (error O(step^2)).
    std::vector<std::pair<double, double>> series(double T0, double T1) const {
        const double h = table_.step();
        const auto j0 = static_cast<std::size_t>(std::ceil(std::max(0.0, T0) / h - 1e-9));
        const auto j1 = static_cast<std::size_t>(std::floor(T1 / h + 1e-9));
        if (j1 + 1 >= table_.size() || floor_exp(T1) > coeffs_.x_max())
            throw DomainError("ball_volume_series: T beyond the prepared range");
        std::vector<double> w(j1 + 2, 0.0);
        for (std::size_t m = 1; m < D_.size(); ++m) {
            const double u = logs_[m] / h;
            const auto k = static_cast<std::size_t>(u);
            if (k > j1) break;
            const double f = u - static_cast<double>(k);
            w[k] += D_[m] * (1.0 - f);
            w[k + 1] += D_[m] * f;
        }
        std::vector<std::pair<double, double>> out(j1 >= j0 ? j1 - j0 + 1 : 0);
        constexpr std::size_t chunks = 64;
        parallel::for_chunks(chunks, opt_.workers, [&](std::size_t c) {
            const auto [lo, hi] = parallel::chunk_range(out.size(), chunks, c);
            for (std::size_t i = lo; i < hi; ++i) {
                const std::size_t j = j0 + i;
                arith::CompensatedSum acc;
                for (std::size_t k = 0; k <= j; ++k) acc.add(w[k] * table_.node(j - k));
                out[i] = {static_cast<double>(j) * h, acc.value()};
            }
        });
        return out;
    }

private:
    AdelicOptions opt_;
    ArchimedeanBallTable table_;
    dirichlet::CoeffTable coeffs_;
    std::vector<double> D_;
    std::vector<double> logs_;
};

inline double adelic_ball_volume(int d, double B, double T, const AdelicOptions& opt = {}) {
    if (!(T > 0.0)) throw DomainError("adelic_ball_volume: T must be positive");
    return AdelicBall(d, B, T, opt)(T);
}

struct BallVolumeSeries {
    std::vector<double> T_grid;
    std::vector<double> values;
};

inline BallVolumeSeries ball_volume_series(int d, double B, double T0, double T1, const AdelicOptions& opt = {}) {
    if (!(T1 >= T0)) throw DomainError("ball_volume_series: need T0 <= T1");
    const AdelicBall ball(d, B, T1 + 2 * opt.step, opt);
    BallVolumeSeries s;
    for (const auto& [t, v] : ball.series(T0, T1)) {
        s.T_grid.push_back(t);
        s.values.push_back(v);
    }
    return s;
}

// ---------------------------------------------------------------------------
// Prediction

struct PredictionTerm {
    std::string label;
    double exponent;  // E in e^{E T}
    double value;
};

struct Prediction {
    int d;
    double B;
    double T;
    double covolume;
    double simplex_area;   // a
    double euler_constant; // C = L(B)
    double euler_bound;    // truncation bound on log C
    bool below_threshold;  // B <= s_2(d): outside the formula's range
    PredictionTerm stated;   // E = B
    PredictionTerm measured; // E = 2B, the growth rate of b^inf
};

inline Prediction prediction_N(int d, double B, double T, double covolume, std::int64_t cutoff = 100000) {
    if (!(covolume > 0.0)) throw DomainError("prediction_N: covolume must be positive");
    if (T < 0.0) throw DomainError("prediction_N: T must be >= 0");
    const int r = d - 1;
    const double a = archimedean::simplex_area(d);
    const auto L = dirichlet::L_euler(d, dirichlet::Complex(B, 0.0), cutoff);
    const double C = L.value.real();
    const double poly = r == 1 ? 1.0 : std::pow(B * T, r - 1);
    const double base = a * C * poly / covolume;
    return {d,
            B,
            T,
            covolume,
            a,
            C,
            L.truncation_bound,
            B <= dirichlet::pole_abscissa(d, 2),
            {"stated_E=B", B, base * std::exp(B * T)},
            {"measured_E=2B", 2 * B, base * std::exp(2 * B * T)}};
}

// ---------------------------------------------------------------------------
// Regularity

/// Samples of a function on the uniform grid t0 + k*step, linear in between.
struct SampledFunction {
    double t0;
    double step;
    std::vector<double> values;

    double t_end() const { return t0 + step * static_cast<double>(values.size() - 1); }

    double operator()(double t) const {
        const double u = (t - t0) / step;
        if (u < -1e-9 || u > static_cast<double>(values.size() - 1) + 1e-9)
            throw DomainError("SampledFunction: argument outside the sampled range");
        const double uc = std::clamp(u, 0.0, static_cast<double>(values.size() - 1));
        const double kr = std::round(uc);
        if (std::abs(uc - kr) < 1e-9) return values[static_cast<std::size_t>(kr)];
        const auto k = static_cast<std::size_t>(uc);
        const double f = uc - static_cast<double>(k);
        return values[k] * (1.0 - f) + values[k + 1] * f;
    }
};

inline SampledFunction sample_function(const std::function<double(double)>& f, double t0, double t1, double step) {
    if (!(step > 0.0) || !(t1 > t0)) throw DomainError("sample_function: need t1 > t0 and step > 0");
    const auto n = static_cast<std::size_t>(std::llround((t1 - t0) / step)) + 1;
    SampledFunction s{t0, step, std::vector<double>(n)};
    for (std::size_t k = 0; k < n; ++k) s.values[k] = f(t0 + static_cast<double>(k) * step);
    return s;
}

inline SampledFunction to_sampled(const BallVolumeSeries& s) {
    if (s.T_grid.size() < 2) throw DomainError("to_sampled: need at least two samples");
    return {s.T_grid.front(), s.T_grid[1] - s.T_grid[0], s.values};
}

enum class Verdict { regular, non_regular, inconclusive };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::regular: return "regular";
        case Verdict::non_regular: return "non-regular";
        default: return "inconclusive";
    }
}

struct RegularityRow {
    double eps;
    double liminf_lower;  // inf over the tail of b(T - eps) / b(T)
    double limsup_upper;  // sup over the tail of b(T + eps) / b(T)
    double gap;           // max(1 - liminf, limsup - 1)
};

struct RegularityReport {
    std::vector<RegularityRow> rows;  // eps decreasing
    bool gap_shrinks;                 // gap nonincreasing as eps decreases
    double gap;                       // at the smallest eps
    Verdict verdict;
};

struct RegularityThresholds {
    double regular_gap = 0.02;
    double non_regular_gap = 0.1;
};

/// Tail ratios over the upper half of T_list for each eps.
inline RegularityReport regularity_report(const SampledFunction& b, std::vector<double> eps_list,
                                          const std::vector<double>& T_list, const RegularityThresholds& th = {}) {
    if (eps_list.empty() || T_list.empty()) throw DomainError("regularity_report: empty eps or T list");
    std::sort(eps_list.begin(), eps_list.end(), std::greater<>());
    if (!(eps_list.back() > 0.0)) throw DomainError("regularity_report: eps must be positive");
    if (b.step > eps_list.back() / 10.0 * (1.0 + 1e-9))
        throw DomainError("regularity_report: grid resolution coarser than min(eps)/10");
    const std::size_t tail = T_list.size() / 2;
    RegularityReport rep{{}, true, 0.0, Verdict::inconclusive};
    for (double eps : eps_list) {
        double lo = INFINITY, hi = -INFINITY;
        for (std::size_t i = tail; i < T_list.size(); ++i) {
            const double T = T_list[i];
            const double bt = b(T);
            if (!(bt > 0.0)) throw DomainError("regularity_report: b must be positive on the tail");
            lo = std::min(lo, b(T - eps) / bt);
            hi = std::max(hi, b(T + eps) / bt);
        }
        const double gap = std::max(1.0 - lo, hi - 1.0);
        if (!rep.rows.empty() && gap > rep.rows.back().gap + 1e-12) rep.gap_shrinks = false;
        rep.rows.push_back({eps, lo, hi, gap});
    }
    rep.gap = rep.rows.back().gap;
    rep.verdict = rep.gap <= th.regular_gap      ? Verdict::regular
                  : rep.gap > th.non_regular_gap ? Verdict::non_regular
                                                 : Verdict::inconclusive;
    return rep;
}

/// Ball of radius T in the (q+1)-regular tree: 1 + (q+1)(q^n - 1)/(q - 1)
/// with n = floor(T). T within 1e-9 below an integer rounds up to it.
inline std::int64_t tree_ball(std::int64_t q, double T) {
    if (q < 2) throw DomainError("tree_ball: q must be >= 2");
    if (T < 0.0) throw DomainError("tree_ball: T must be >= 0");
    const auto n = static_cast<unsigned>(std::floor(T + 1e-9));
    const BigInt v = 1 + (q + 1) * (arith::ipow(q, n) - 1) / (q - 1);
    if (v > std::numeric_limits<std::int64_t>::max()) throw BudgetError("tree_ball: count exceeds 64 bits", n, 62);
    return v.convert_to<std::int64_t>();
}

// ---------------------------------------------------------------------------
// Persistence of asymptotics under convolution

struct PointMass {
    double location;
    double mass;
};

struct MeasurePair {
    std::vector<PointMass> mu;
    std::function<double(double)> nu;  // T -> nu([0, T])
    double nu_range;                   // nu is known on [0, nu_range]
    double alpha;
    double beta;
    std::optional<double> C_override;  // constant of the full measure when mu is a truncation

    MeasurePair(std::vector<PointMass> masses, std::function<double(double)> cumulative, double range, double a,
                double b, std::optional<double> C = std::nullopt)
        : mu(std::move(masses)), nu(std::move(cumulative)), nu_range(range), alpha(a), beta(b), C_override(C) {
        if (a < 0.0 || !(b > 0.0)) throw DomainError("MeasurePair: need alpha >= 0, beta > 0");
        for (const auto& pm : mu)
            if (pm.location < 0.0 || !(pm.mass > 0.0))
                throw DomainError("MeasurePair: masses must be positive at nonnegative locations");
        std::sort(mu.begin(), mu.end(), [](const PointMass& x, const PointMass& y) { return x.location < y.location; });
    }

    /// sum mass * e^{-beta * location}
    double C() const {
        if (C_override) return *C_override;
        arith::CompensatedSum acc;
        for (const auto& pm : mu) acc.add(pm.mass * std::exp(-beta * pm.location));
        return acc.value();
    }
};

struct PersistenceResult {
    double d_T;
    double ratio;
    double C;
};

/// d(T) = sum_{t <= T} mass * nu([0, T - t]) against C T^alpha e^{beta T}.
inline PersistenceResult persistence_check(const MeasurePair& pair, double T) {
    if (!(T > 0.0)) throw DomainError("persistence_check: T must be positive");
    if (T > pair.nu_range) throw DomainError("persistence_check: nu is not sampled up to T");
    arith::CompensatedSum acc;
    for (const auto& pm : pair.mu) {
        if (pm.location > T) break;
        acc.add(pm.mass * pair.nu(T - pm.location));
    }
    const double C = pair.C();
    const double main = C * std::pow(T, pair.alpha) * std::exp(pair.beta * T);
    return {acc.value(), acc.value() / main, C};
}

// ---------------------------------------------------------------------------
// Covering numbers for the max-norm ball

struct CoveringResult {
    std::uint64_t count;
    double overlap_ratio;  // count * b(delta) / b(T)
};

/// Minimal number of max-norm delta-balls covering a max-norm T-ball in R^n:
/// ceil(T/delta)^n, attained by the grid.
inline CoveringResult covering_number_box(int n, double T, double delta) {
    if (n < 1) throw DomainError("covering_number_box: n must be >= 1");
    if (!(delta > 0.0) || !(delta < T)) throw DomainError("covering_number_box: need 0 < delta < T");
    const double per_axis = std::ceil(T / delta * (1.0 - 1e-12));
    const double total = std::pow(per_axis, n);
    if (total > 1.8e19) throw BudgetError("covering_number_box: count exceeds 64 bits", total, 1.8e19);
    std::uint64_t count = 1;
    for (int i = 0; i < n; ++i) count *= static_cast<std::uint64_t>(per_axis);
    return {count, static_cast<double>(count) * std::pow(delta / T, n)};
}

}  // namespace heightgrowth::adelic
