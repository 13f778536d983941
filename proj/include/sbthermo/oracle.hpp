// oracle.hpp — independent reference implementations used for validation
// only: the analytic pure-dephasing solution and a second-order
// time-convolutionless propagator driven directly by the quadrature
// correlation function. No hierarchy code is involved, so agreement with the
// HEOM is evidence rather than tautology.

#pragma once

#include <complex>
#include <vector>

#include "sbthermo/bath.hpp"
#include "sbthermo/hierarchy.hpp"
#include "sbthermo/pauli.hpp"

namespace sbt {

// Decoherence function Gamma(t) = (4/pi) int_0^inf J coth(bw/2)(1-cos wt)/w^2.
// Thermal part by adaptive quadrature, zero-temperature part in closed form
// via exponential integrals.
double dephasing_gamma(double t, const BathSpec& spec, double rel_tol = 1e-11);

// Exact coherence of the pure-dephasing (delta = 0) model:
// rho_01(t) = rho_01(0) e^{2 i epsilon t} e^{-Gamma(t)}.
std::complex<double> dephasing_coherence(double t, const BathSpec& spec, double epsilon,
                                         std::complex<double> rho01_initial);

struct Tcl2Options {
    double dt{0.01};
    double t_final{10.0};
    int output_stride{1};
    double quad_rel_tol{1e-10};
};

// Second-order TCL (time-local Redfield) propagation with the memory kernel
// Lambda(t) = int_0^t C(s) A(-s) ds integrated alongside the state; intended
// for weak coupling (alpha <~ 0.05).
std::vector<TrajectoryPoint> tcl2_propagate(const SystemSpec& sys, const BathSpec& spec,
                                            const Mat2& rho0, const Tcl2Options& opts);

}  // namespace sbt
