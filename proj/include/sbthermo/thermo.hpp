// thermo.hpp — work, heat, entropy and entropy production from the state
// trajectory and the effective-Hamiltonian series, plus their weak-coupling
// counterparts.

#pragma once

#include <vector>

#include "sbthermo/hierarchy.hpp"
#include "sbthermo/pauli.hpp"

namespace sbt {

struct ThermoSeries {
    std::vector<double> times;      // uniform grid, units 1/omega_c
    std::vector<double> u;          // U_S = Tr{K_S rho}
    std::vector<double> w;          // int Tr{Kdot rho}
    std::vector<double> q;          // int Tr{K rhodot}
    std::vector<double> ds;         // S(rho(t)) - S(rho(0))
    std::vector<double> sigma_tot;  // Sigma_S = dS - beta Q
    std::vector<double> sigma_rate; // sigma_S = dS/dt - beta dQ/dt
    std::vector<double> w_weak;     // weak-coupling work (zero for constant H_S)
    std::vector<double> q_weak;     // int Tr{H_S rhodot}
    std::vector<double> sigma_weak_rate;
    double beta{0.0};

    double first_law_residual() const;  // max_t |dU - W - Q|
};

// U_S(t) = Tr{K_S(t) rho(t)}; imaginary parts beyond 1e-10 scale are rejected.
std::vector<double> internal_energy(const std::vector<Mat2>& k_s,
                                    const std::vector<TrajectoryPoint>& states);

// W_S(t) = int_0^t Tr{Kdot rho}; Kdot by centered differences on the uniform
// grid (one-sided at the ends), composite-trapezoid cumulative integral.
std::vector<double> work(const std::vector<double>& times, const std::vector<Mat2>& k_s,
                         const std::vector<TrajectoryPoint>& states);

// Q_S(t) = int_0^t Tr{K rhodot} with the exact rhodot from the hierarchy.
std::vector<double> heat(const std::vector<double>& times, const std::vector<Mat2>& k_s,
                         const std::vector<TrajectoryPoint>& states);

struct WeakCoupling {
    std::vector<double> w;  // zero for constant H_S
    std::vector<double> q;
    std::vector<double> sigma_rate;
};

WeakCoupling weak_coupling_observables(const std::vector<double>& times, const Mat2& h_s,
                                       const std::vector<TrajectoryPoint>& states, double beta);

// Von Neumann entropy with eigenvalues clamped to [1e-14, 1] inside the log.
double von_neumann_entropy(const Mat2& rho);

struct EntropyProduction {
    std::vector<double> ds;
    std::vector<double> sigma_tot;
    std::vector<double> sigma_rate;
};

// Throws if any state eigenvalue drops below -1e-6.
EntropyProduction entropy_and_production(const std::vector<double>& times,
                                         const std::vector<TrajectoryPoint>& states,
                                         const std::vector<Mat2>& k_s,
                                         const std::vector<double>& q, double beta);

// Full series in one pass; grids must be aligned.
ThermoSeries compute_thermo(const std::vector<double>& times,
                            const std::vector<TrajectoryPoint>& states,
                            const std::vector<Mat2>& k_s, const Mat2& h_s, double beta);

}  // namespace sbt
