#include "kacld/cw.hpp"

#include "kacld/parallel.hpp"
#include "kacld/quadrature.hpp"
#include "kacld/torus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <stdexcept>

namespace kacld {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEdge = 1.0 - 1e-12;
constexpr double kScanStep = 1e-3;
constexpr double kGoldenTol = 1e-10;
constexpr double kGapTol = 1e-8;
constexpr double kSeparation = 1e-4;
constexpr double kMPrimeRefine = 1e-6;
constexpr double kTimeRefine = 1e-4;
constexpr double kMaxTime = 300.0;

void check_mag(double m, const char* what) {
    if (!(std::abs(m) <= 1.0)) throw std::domain_error(std::string(what) + " outside [-1,1]");
}

void check_time(double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("time must be >= 0");
    if (t > kMaxTime) throw std::invalid_argument("time exceeds supported horizon (300)");
}

double clamp_open(double m) { return std::clamp(m, -kEdge, kEdge); }

double xlog1m(double x) {
    const double r = 1.0 - x;
    return r > 0.0 ? r * std::log(r) : 0.0;
}

} // namespace

CWModel::CWModel(double j, double h) : j_cw(j), h_cw(h) {
    if (!(j > 0.0)) throw std::invalid_argument("mean-field coupling must be > 0");
    if (!std::isfinite(h)) throw std::invalid_argument("mean-field field must be finite");
}

double cw_lagrangian(double m, double q) {
    check_mag(m, "magnetization");
    if (m == 1.0) {
        if (q > 0.0) return kInf;
        if (q == 0.0) return 1.0;
        return 1.0 + 0.5 * q + 0.5 * q * std::log(2.0 / -q);
    }
    if (m == -1.0) {
        if (q < 0.0) return kInf;
        if (q == 0.0) return 1.0;
        return 1.0 - 0.5 * q + 0.5 * q * std::log(0.5 * q);
    }
    const double r = std::sqrt(4.0 * (1.0 - m * m) + q * q);
    // r + q loses digits for q < 0; use (r+q)(r-q) = 4(1-m^2)
    const double rpq = q >= 0.0 ? r + q : 4.0 * (1.0 - m * m) / (r - q);
    return 1.0 - 0.5 * r + 0.5 * q * std::log(rpq / (2.0 * (1.0 - m)));
}

double cw_trajectory(double m, double m_prime, double t, double s) {
    check_mag(m, "initial magnetization");
    check_mag(m_prime, "final magnetization");
    check_time(t);
    if (!(s >= 0.0 && s <= t)) throw std::invalid_argument("s outside [0,t]");
    if (t == 0.0) {
        if (m == m_prime) return m;
        throw std::invalid_argument("incompatible endpoints at t = 0");
    }
    if (s == 0.0) return m;
    if (s == t) return m_prime;
    return (m * std::sinh(2.0 * (t - s)) + m_prime * std::sinh(2.0 * s)) / std::sinh(2.0 * t);
}

double cw_trajectory_velocity(double m, double m_prime, double t, double s) {
    check_mag(m, "initial magnetization");
    check_mag(m_prime, "final magnetization");
    check_time(t);
    if (t == 0.0) throw std::invalid_argument("velocity undefined at t = 0");
    if (!(s >= 0.0 && s <= t)) throw std::invalid_argument("s outside [0,t]");
    return 2.0 * (-m * std::cosh(2.0 * (t - s)) + m_prime * std::cosh(2.0 * s)) /
           std::sinh(2.0 * t);
}

double cw_action(double m, double m_prime, double t, bool* clamped) {
    check_mag(m, "initial magnetization");
    check_mag(m_prime, "final magnetization");
    check_time(t);
    if (clamped) *clamped = false;
    if (t == 0.0) return m == m_prime ? 0.0 : kInf;
    const double m0 = clamp_open(m);
    const double m1 = clamp_open(m_prime);
    if (clamped && (m0 != m || m1 != m_prime)) *clamped = true;
    const double d = std::sinh(2.0 * t);
    const auto integrand = [&](double s) {
        const double phi = (m0 * std::sinh(2.0 * (t - s)) + m1 * std::sinh(2.0 * s)) / d;
        const double vel =
            2.0 * (-m0 * std::cosh(2.0 * (t - s)) + m1 * std::cosh(2.0 * s)) / d;
        return cw_lagrangian(std::clamp(phi, -1.0, 1.0), vel);
    };
    const double a = integrate(integrand, 0.0, t, 1e-9);
    return (a < 0.0 && a > -1e-12) ? 0.0 : a;
}

double cw_action_closed(double m, double m_prime, double t) {
    check_mag(m, "initial magnetization");
    check_mag(m_prime, "final magnetization");
    check_time(t);
    if (t == 0.0) return m == m_prime ? 0.0 : kInf;
    if (std::min(1.0 - std::abs(m), 1.0 - std::abs(m_prime)) < 1e-9)
        return cw_action(m, m_prime, t);

    const double c = std::cosh(2.0 * t);
    const double d = std::sinh(2.0 * t);
    const double bigT = std::tanh(t);
    const double ksq = d * d + m * m + m_prime * m_prime - 2.0 * m * m_prime * c;
    const double K = std::sqrt(ksq);
    const double p0 = m_prime - m * c;
    const double pt = m_prime * c - m;
    // K^2 - p0^2 = d^2 (1-m^2) and K^2 - pt^2 = d^2 (1-m'^2): stable sums
    const double kp0 = p0 > 0.0 ? K + p0 : d * d * (1.0 - m * m) / (K - p0);
    const double kpt = pt > 0.0 ? K + pt : d * d * (1.0 - m_prime * m_prime) / (K - pt);
    const double kappa_v0 = 2.0 * kp0 / d; // kappa2 + phidot(0)
    const double kappa_vt = 2.0 * kpt / d; // kappa2 + phidot(t)
    const double kappa2 = 2.0 * K / d;

    // int ds/(kappa2 + phidot) becomes rational in tau = tanh s
    const double a = p0 - K;
    const double b = m * d;
    const double i3 = 0.25 * std::log(std::abs(((a * bigT + b - d) * (b + d)) /
                                               ((a * bigT + b + d) * (b - d))));

    double acc = t * (1.0 - K / d);
    acc += 0.5 * (m_prime * std::log(kappa_vt) - m * std::log(kappa_v0) + kappa2 * t -
                  4.0 * i3 - (m_prime - m) * std::log(2.0) + xlog1m(m_prime) - xlog1m(m));
    return (acc < 0.0 && acc > -1e-12) ? 0.0 : acc;
}

double cw_static_rate(double m, const CWModel& cw) {
    return -0.5 * cw.j_cw * m * m - cw.h_cw * m + entropy_phi(m);
}

double cw_cost(double m, double m_prime, double t, const CWModel& cw) {
    const double a = cw_action(m, m_prime, t);
    return std::isinf(a) ? a : cw_static_rate(m, cw) + a;
}

double cw_cost_slope(double m, double m_prime, double t, double a_field) {
    check_mag(m_prime, "final magnetization");
    if (!(std::abs(m) < 1.0)) throw std::domain_error("slope defined on the open interval");
    check_time(t);
    if (t == 0.0) throw std::invalid_argument("slope undefined at t = 0");
    const double c = std::cosh(2.0 * t);
    const double d = std::sinh(2.0 * t);
    const double K =
        std::sqrt(d * d + m * m + m_prime * m_prime - 2.0 * m * m_prime * c);
    const double p = m_prime - m * c;
    const double kmp = p < 0.0 ? K - p : d * d * (1.0 - m * m) / (K + p);
    return -a_field + 0.5 * std::log(kmp / (d * (1.0 - m)));
}

namespace {

// Golden-section minimization; f assumed unimodal on [a,b].
std::pair<double, double> golden_section(const std::function<double(double)>& f, double a,
                                         double b, double xtol) {
    constexpr double invphi = 0.6180339887498949;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > xtol) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        }
    }
    const double xm = 0.5 * (a + b);
    return {xm, f(xm)};
}

// Illinois-damped regula falsi; assumes g(lo), g(hi) have opposite signs.
double refine_root(const std::function<double(double)>& g, double lo, double hi, double glo,
                   double ghi, double xtol) {
    for (int it = 0; it < 200 && hi - lo > xtol; ++it) {
        double mid = (lo * ghi - hi * glo) / (ghi - glo);
        if (!(mid > lo && mid < hi)) mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if (gm == 0.0) return mid;
        if ((gm > 0.0) == (ghi > 0.0)) {
            hi = mid;
            ghi = gm;
            glo *= 0.5;
        } else {
            lo = mid;
            glo = gm;
            ghi *= 0.5;
        }
    }
    return 0.5 * (lo + hi);
}

struct ScanMinimum {
    double m = 0.0;
    double cost = 0.0;
};

struct Multiplicity {
    std::vector<ScanMinimum> minima; // ascending m
    int global_count = 1;
    double delta = 0.0; // signed cost gap between the two lowest minima
    bool has_pair = false;
    ScanMinimum pair_low, pair_high;
};

// Critical-point based multiplicity analysis for one (t, m') cell. The cost
// slope has an exact closed form, so critical points come from a dense sign
// scan plus root refinement; costs are evaluated only at local minima.
class CwScanner {
  public:
    CwScanner(const CWModel& cw, double t)
        : cw_(cw), t_(t), c_(std::cosh(2.0 * t)), d_(std::sinh(2.0 * t)) {
        if (!(t > 0.0)) throw std::invalid_argument("t must be > 0");
        const int n = 1999; // interior nodes -0.999 .. 0.999
        ms_.resize(n);
        afield_.resize(n);
        logd1m_.resize(n);
        mc_.resize(n);
        msq_.resize(n);
        for (int i = 0; i < n; ++i) {
            const double m = (i - 999) / 1000.0;
            ms_[i] = m;
            afield_[i] = cw.j_cw * m + cw.h_cw;
            logd1m_[i] = std::log(d_ * (1.0 - m));
            mc_[i] = m * c_;
            msq_[i] = m * m;
        }
    }

    double t() const { return t_; }
    const CWModel& model() const { return cw_; }

    double slope(double m, double mp) const {
        return cw_cost_slope(m, mp, t_, cw_.j_cw * m + cw_.h_cw);
    }

    double cost(double m, double mp) const {
        return cw_static_rate(m, cw_) + cw_action_closed(m, mp, t_);
    }

    Multiplicity analyze(double mp) const {
        Multiplicity out;
        const std::size_t n = ms_.size();
        const double mpsq = mp * mp;
        auto slope_at = [&](std::size_t i) {
            const double K = std::sqrt(d_ * d_ + msq_[i] + mpsq - 2.0 * mp * mc_[i]);
            const double p = mp - mc_[i];
            const double kmp =
                p < 0.0 ? K - p : d_ * d_ * (1.0 - msq_[i]) / (K + p);
            return -afield_[i] + 0.5 * (std::log(kmp) - logd1m_[i]);
        };
        // slope -> -inf at m = -1+ and +inf at m = 1-, so brackets at the
        // edges are implied
        double prev_m = -kEdge;
        double prev_s = -1.0;
        auto g = [&](double m) { return slope(m, mp); };
        for (std::size_t i = 0; i <= n; ++i) {
            const double cur_m = i < n ? ms_[i] : kEdge;
            const double cur_s = i < n ? slope_at(i) : +1.0;
            if (prev_s < 0.0 && cur_s >= 0.0) { // local minimum bracket
                const double root =
                    refine_root(g, prev_m, cur_m, i == 0 ? g(prev_m) : prev_s,
                                i == n ? g(cur_m) : cur_s, 1e-12);
                out.minima.push_back({root, cost(root, mp)});
            }
            prev_m = cur_m;
            prev_s = cur_s;
        }
        // merge refined minima closer than the separation threshold
        std::sort(out.minima.begin(), out.minima.end(),
                  [](const ScanMinimum& a, const ScanMinimum& b) { return a.m < b.m; });
        std::vector<ScanMinimum> merged;
        for (const auto& mn : out.minima) {
            if (!merged.empty() && mn.m - merged.back().m < kSeparation) {
                if (mn.cost < merged.back().cost) merged.back() = mn;
            } else {
                merged.push_back(mn);
            }
        }
        out.minima = std::move(merged);

        double best = kInf;
        for (const auto& mn : out.minima) best = std::min(best, mn.cost);
        out.global_count = 0;
        for (const auto& mn : out.minima)
            if (mn.cost <= best + kGapTol) ++out.global_count;
        if (out.minima.size() >= 2) {
            // signed gap between the two lowest minima, ordered by m
            std::size_t i1 = 0;
            for (std::size_t i = 1; i < out.minima.size(); ++i)
                if (out.minima[i].cost < out.minima[i1].cost) i1 = i;
            std::size_t i2 = i1 == 0 ? 1 : 0;
            for (std::size_t i = 0; i < out.minima.size(); ++i)
                if (i != i1 && out.minima[i].cost < out.minima[i2].cost) i2 = i;
            const std::size_t lo = std::min(i1, i2), hi = std::max(i1, i2);
            out.delta = out.minima[lo].cost - out.minima[hi].cost;
            out.has_pair = true;
            out.pair_low = out.minima[lo];
            out.pair_high = out.minima[hi];
        }
        return out;
    }

  private:
    CWModel cw_;
    double t_;
    double c_, d_;
    std::vector<double> ms_, afield_, logd1m_, mc_, msq_;
};

} // namespace

CWCostCurve cw_global_minima(double t, double m_prime, const CWModel& cw, double gap_tol) {
    if (!(t > 0.0)) throw std::invalid_argument("t must be > 0");
    check_mag(m_prime, "final magnetization");
    check_time(t);
    CWCostCurve out;
    out.t = t;
    out.m_prime = m_prime;

    const int n = 2001;
    out.samples.reserve(n);
    for (int k = 0; k < n; ++k) {
        const double m = (k - 1000) / 1000.0;
        out.samples.emplace_back(m, cw_cost(m, m_prime, t, cw));
    }
    const auto f = [&](double m) { return cw_cost(m, m_prime, t, cw); };
    for (int k = 0; k < n; ++k) {
        const double c = out.samples[k].second;
        const bool left_ok = k == 0 || out.samples[k - 1].second > c;
        const bool right_ok = k == n - 1 || out.samples[k + 1].second >= c;
        if (!(left_ok && right_ok)) continue;
        if (k == 0 || k == n - 1) {
            out.minima.push_back({out.samples[k].first, c});
            continue;
        }
        const auto [m_ref, c_ref] =
            golden_section(f, out.samples[k - 1].first, out.samples[k + 1].first, kGoldenTol);
        out.minima.push_back({m_ref, c_ref});
    }
    std::sort(out.minima.begin(), out.minima.end(),
              [](const CWMinimum& a, const CWMinimum& b) { return a.m < b.m; });
    std::vector<CWMinimum> merged;
    for (const auto& mn : out.minima) {
        if (!merged.empty() && mn.m - merged.back().m < kSeparation) {
            if (mn.cost < merged.back().cost) merged.back() = mn;
        } else {
            merged.push_back(mn);
        }
    }
    out.minima = std::move(merged);

    double best = kInf;
    for (const auto& mn : out.minima) best = std::min(best, mn.cost);
    for (std::size_t i = 0; i < out.minima.size(); ++i)
        if (out.minima[i].cost <= best + gap_tol) out.global_set.push_back(i);
    return out;
}

namespace {

BadSetReport bad_set_from_scan(const CwScanner& scan, const std::vector<Multiplicity>& cells,
                               const std::vector<double>& mprimes) {
    BadSetReport out;
    out.t = scan.t();
    const auto push_bad = [&](double mp, const Multiplicity& mult) {
        if (!mult.has_pair) return;
        if (mult.pair_high.m - mult.pair_low.m < kSeparation) return;
        BadPoint bp;
        bp.m_prime = mp;
        bp.minimizer_low = mult.pair_low.m;
        bp.minimizer_high = mult.pair_high.m;
        bp.cost = std::min(mult.pair_low.cost, mult.pair_high.cost);
        out.bad_points.push_back(bp);
    };

    // direct ties on grid nodes
    std::vector<bool> node_tie(cells.size(), false);
    for (std::size_t k = 0; k < cells.size(); ++k) {
        if (cells[k].has_pair && std::abs(cells[k].delta) <= kGapTol) {
            node_tie[k] = true;
            push_bad(mprimes[k], cells[k]);
        }
    }
    // sign changes of the cost gap between adjacent cells
    for (std::size_t k = 0; k + 1 < cells.size(); ++k) {
        if (!cells[k].has_pair || !cells[k + 1].has_pair) continue;
        if (node_tie[k] || node_tie[k + 1]) continue;
        if (cells[k].delta * cells[k + 1].delta >= 0.0) continue;
        double lo = mprimes[k], hi = mprimes[k + 1];
        double dlo = cells[k].delta;
        const double scale = std::max(std::abs(cells[k].delta), std::abs(cells[k + 1].delta));
        Multiplicity mid_mult;
        while (hi - lo > kMPrimeRefine) {
            const double mid = 0.5 * (lo + hi);
            mid_mult = scan.analyze(mid);
            if (!mid_mult.has_pair) break;
            if ((mid_mult.delta > 0.0) == (dlo > 0.0)) {
                lo = mid;
                dlo = mid_mult.delta;
            } else {
                hi = mid;
            }
        }
        const double mp = 0.5 * (lo + hi);
        const Multiplicity refined = scan.analyze(mp);
        // a genuine tie shrinks the gap with the bracket; a jump in the
        // identity of the two lowest minima does not
        if (refined.has_pair && std::abs(refined.delta) <= std::max(0.02 * scale, kGapTol))
            push_bad(mp, refined);
    }
    std::sort(out.bad_points.begin(), out.bad_points.end(),
              [](const BadPoint& a, const BadPoint& b) { return a.m_prime < b.m_prime; });
    // collapse points within two grid cells of each other
    std::vector<BadPoint> dedup;
    for (const auto& bp : out.bad_points) {
        if (!dedup.empty() && bp.m_prime - dedup.back().m_prime < 2.0 * kScanStep) continue;
        dedup.push_back(bp);
    }
    out.bad_points = std::move(dedup);
    return out;
}

BadSetReport compute_bad_set(const CWModel& cw, double t) {
    CwScanner scan(cw, t);
    const int n = 2001;
    std::vector<double> mprimes(n);
    std::vector<Multiplicity> cells(n);
    for (int k = 0; k < n; ++k) {
        mprimes[k] = (k - 1000) / 1000.0;
        cells[k] = scan.analyze(mprimes[k]);
    }
    return bad_set_from_scan(scan, cells, mprimes);
}

struct StructuralSig {
    int count = 0;
    bool at_zero = false;
    bool symmetric_pair = false;

    bool operator==(const StructuralSig&) const = default;
};

StructuralSig structural(const BadSetReport& r) {
    StructuralSig s;
    s.count = static_cast<int>(r.bad_points.size());
    if (s.count == 1) s.at_zero = std::abs(r.bad_points[0].m_prime) <= 2.0 * kScanStep;
    if (s.count == 2)
        s.symmetric_pair =
            std::abs(r.bad_points[0].m_prime + r.bad_points[1].m_prime) <= 2.0 * kScanStep;
    return s;
}

std::string render_numeric(const BadSetReport& r) {
    if (r.bad_points.empty()) return "empty";
    std::string out = "{";
    char buf[64];
    for (std::size_t i = 0; i < r.bad_points.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.6f", r.bad_points[i].m_prime);
        out += buf;
        if (i + 1 < r.bad_points.size()) out += ", ";
    }
    return out + "}";
}

std::string label_for(const StructuralSig& before, const StructuralSig& after) {
    if (before.count == 0) return after.at_zero ? "Psi_c" : "Psi_U";
    if (after.count == 0) return "Psi_star";
    if (after.at_zero) return "Psi_c";
    if (before.count == 1 && after.count == 2) return "Psi_L";
    if (before.count == 2 && after.count == 1) return "Psi_T";
    return "transition";
}

std::vector<TransitionFeature> features_from_grid(const CWModel& cw,
                                                  const std::vector<double>& ts,
                                                  const std::vector<BadSetReport>& reports) {
    std::vector<TransitionFeature> features;
    for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
        StructuralSig lo_sig = structural(reports[k]);
        const StructuralSig hi_sig = structural(reports[k + 1]);
        if (lo_sig == hi_sig) continue;
        double lo = ts[k], hi = ts[k + 1];
        BadSetReport lo_rep = reports[k], hi_rep = reports[k + 1];
        while (hi - lo > kTimeRefine) {
            const double mid = 0.5 * (lo + hi);
            BadSetReport mid_rep = compute_bad_set(cw, mid);
            if (structural(mid_rep) == lo_sig) {
                lo = mid;
                lo_rep = std::move(mid_rep);
            } else {
                hi = mid;
                hi_rep = std::move(mid_rep);
            }
        }
        TransitionFeature f;
        f.label = label_for(lo_sig, structural(hi_rep));
        f.t = 0.5 * (lo + hi);
        f.bad_set_before = render_numeric(lo_rep);
        f.bad_set_after = render_numeric(hi_rep);
        features.push_back(std::move(f));
    }
    return features;
}

} // namespace

BadSetReport cw_bad_set(double t, const CWModel& cw) {
    check_time(t);
    return compute_bad_set(cw, t);
}

std::string bad_set_signature(const BadSetReport& report) {
    const StructuralSig s = structural(report);
    if (s.count == 0) return "empty";
    if (s.count == 1) return s.at_zero ? "{0}" : "{c}";
    if (s.count == 2) return s.symmetric_pair ? "{+-c}" : "{c1, c2}";
    return "{x" + std::to_string(s.count) + "}";
}

std::vector<TransitionFeature> detect_transition_times(const CWModel& cw, double t_max,
                                                       double t_step, int threads) {
    if (!(t_max > 0.0)) throw std::invalid_argument("t_max must be > 0");
    std::vector<double> ts;
    for (double t = t_step; t <= t_max + 1e-12; t += t_step) ts.push_back(t);
    if (ts.empty()) throw std::invalid_argument("no transition in window: t_max below scan step");
    std::vector<BadSetReport> reports(ts.size());
    parallel_for(ts.size(), threads, [&](std::size_t k) { reports[k] = compute_bad_set(cw, ts[k]); });
    return features_from_grid(cw, ts, reports);
}

PhaseDiagram cw_phase_diagram(const CWModel& cw, double t_max, double t_step, int threads) {
    if (!(t_max > 0.0)) throw std::invalid_argument("t_max must be > 0");
    PhaseDiagram out;
    std::vector<double> ts;
    for (double t = t_step; t <= t_max + 1e-12; t += t_step) ts.push_back(t);
    const int nmp = 2001;
    out.cells.resize(ts.size() * nmp);
    out.bad_sets.resize(ts.size());

    parallel_for(ts.size(), threads, [&](std::size_t row) {
        const double t = ts[row];
        CwScanner scan(cw, t);
        std::vector<double> mprimes(nmp);
        std::vector<Multiplicity> cells(nmp);
        for (int k = 0; k < nmp; ++k) {
            mprimes[k] = (k - 1000) / 1000.0;
            cells[k] = scan.analyze(mprimes[k]);
            PhaseCell pc;
            pc.t = t;
            pc.m_prime = mprimes[k];
            pc.multiplicity = cells[k].global_count;
            if (!cells[k].minima.empty()) {
                std::size_t best = 0;
                for (std::size_t i = 1; i < cells[k].minima.size(); ++i)
                    if (cells[k].minima[i].cost < cells[k].minima[best].cost) best = i;
                pc.global_min_1 = cells[k].minima[best].m;
                pc.cost = cells[k].minima[best].cost;
                pc.global_min_2 = cells[k].has_pair
                                      ? (cells[k].pair_low.m == pc.global_min_1
                                             ? cells[k].pair_high.m
                                             : cells[k].pair_low.m)
                                      : std::numeric_limits<double>::quiet_NaN();
            }
            out.cells[row * nmp + k] = pc;
        }
        out.bad_sets[row] = bad_set_from_scan(scan, cells, mprimes);
    });
    out.features = features_from_grid(cw, ts, out.bad_sets);
    return out;
}

} // namespace kacld
