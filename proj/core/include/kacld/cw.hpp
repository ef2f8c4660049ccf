#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace kacld {

/// Mean-field reduction parameters (J^CW, h^CW).
struct CWModel {
    double j_cw = 1.0;
    double h_cw = 0.0;

    CWModel() = default;
    CWModel(double j, double h);
};

/// Lagrangian of the independent spin-flip dynamics acting on scalar
/// magnetizations. Unit flip rate convention: zero cost along q = -2m.
double cw_lagrangian(double m, double q);

/// Optimal magnetization path between (0,m) and (t,m'); sinh interpolation.
double cw_trajectory(double m, double m_prime, double t, double s);

/// Analytic s-derivative of cw_trajectory.
double cw_trajectory_velocity(double m, double m_prime, double t, double s);

/// Action of the optimal path, adaptive quadrature to 1e-9 absolute.
/// t = 0 returns 0 for m = m', +infinity otherwise. Endpoints at +-1 are
/// clamped to +-(1 - 1e-12); `clamped`, when given, reports that.
double cw_action(double m, double m_prime, double t, bool* clamped = nullptr);

/// Exact antiderivative evaluation of the same action (valid away from the
/// +-1 edges); used by phase-diagram scans and as a cross-check oracle.
double cw_action_closed(double m, double m_prime, double t);

/// Local static cost -j m^2/2 - h m + Phi(m).
double cw_static_rate(double m, const CWModel& cw);

/// Endpoint-constrained total cost C^CW_{t,m'}(m).
double cw_cost(double m, double m_prime, double t, const CWModel& cw);

/// d/dm of the total cost, with the interaction field passed explicitly so
/// the same expression serves the profile-level Frechet gradient
/// (a = j m + h here, a = beta (J*alpha + h)(u) there).
double cw_cost_slope(double m, double m_prime, double t, double a_field);

struct CWMinimum {
    double m = 0.0;
    double cost = 0.0;
};

struct CWCostCurve {
    double t = 0.0;
    double m_prime = 0.0;
    std::vector<std::pair<double, double>> samples; // (m, cost) on the scan grid
    std::vector<CWMinimum> minima;                  // refined local minima, ascending m
    std::vector<std::size_t> global_set;            // indices into minima
};

/// Dense scan (step 1e-3) plus golden-section refinement (1e-10); global
/// set collects minima within gap_tol of the least cost, treating
/// minimizers closer than 1e-4 as one.
CWCostCurve cw_global_minima(double t, double m_prime, const CWModel& cw,
                             double gap_tol = 1e-8);

struct BadPoint {
    double m_prime = 0.0;
    double minimizer_low = 0.0;
    double minimizer_high = 0.0;
    double cost = 0.0;
};

struct BadSetReport {
    double t = 0.0;
    std::vector<BadPoint> bad_points;
};

/// Final magnetizations whose cost has two global minima: scans m' with
/// step 1e-3 and bisects cost-difference sign changes to 1e-6.
BadSetReport cw_bad_set(double t, const CWModel& cw);

struct TransitionFeature {
    std::string label; // operational: Psi_U / Psi_c / Psi_L / Psi_T / Psi_star
    double t = 0.0;
    std::string bad_set_before;
    std::string bad_set_after;
};

/// Qualitative changes of the bad set over t in (0, t_max]: scans with the
/// given step and bisects each change to 1e-4 in t.
std::vector<TransitionFeature> detect_transition_times(const CWModel& cw, double t_max,
                                                       double t_step = 0.01,
                                                       int threads = 0);

/// Canonical textual form of a bad set ("empty", "{0}", "{+-c}", "{a, b}").
std::string bad_set_signature(const BadSetReport& report);

/// Multiplicity scan cell for phase-diagram output.
struct PhaseCell {
    double t = 0.0;
    double m_prime = 0.0;
    int multiplicity = 1;
    double global_min_1 = 0.0;
    double global_min_2 = 0.0;
    double cost = 0.0;
};

struct PhaseDiagram {
    std::vector<PhaseCell> cells; // row-major over (t, m') scan grid
    std::vector<BadSetReport> bad_sets;
    std::vector<TransitionFeature> features;
};

/// Full (t, m') scan: Delta t as given, Delta m' = 1e-3.
PhaseDiagram cw_phase_diagram(const CWModel& cw, double t_max, double t_step = 0.01,
                              int threads = 0);

} // namespace kacld
