// bath.hpp — Debye spectral density, bath autocorrelation function, and its
// exponential-sum decompositions (Pade / Matsubara) feeding the hierarchy.

#pragma once

#include <complex>
#include <vector>

namespace sbt {

struct BathSpec {
    double alpha{0.0};    // dimensionless Kondo coupling, >= 0
    double omega_c{1.0};  // characteristic bath frequency, > 0
    double beta{1.0};     // inverse temperature, > 0

    void validate() const;
};

struct BathTerm {
    std::complex<double> eta;    // weight
    std::complex<double> gamma;  // decay rate, Re > 0
};

struct BathDecomposition {
    std::vector<BathTerm> terms;
    int n_pade{0};  // number of Bose-function poles used (0 for alpha = 0)

    // Sum of exponentials at time t >= 0.
    std::complex<double> reconstruct(double t) const;

    // Drop terms with |eta| below an absolute threshold (decoupled limits).
    void drop_negligible(double abs_tol = 0.0);
};

// J(omega) = (pi/2) alpha omega omega_c^2 / (omega^2 + omega_c^2).
// Rejects omega < 0.
double spectral_density(double omega, const BathSpec& spec);

// Bath autocorrelation C_B(t) = (1/pi) \int_0^inf J(w) [coth(bw/2) cos(wt)
// - i sin(wt)] dw, evaluated to high accuracy for t > 0. The thermal part is
// done by adaptive quadrature; the temperature-independent part and the
// imaginary part have exponential-integral closed forms. Serves as the
// oracle for the exponential-sum decompositions.
//
// Note: for the Debye form, Re C_B(t) diverges logarithmically as t -> 0+;
// at t = 0 exactly this returns only the (finite, zero) imaginary part plus
// the thermal real part and must not be used as a finite reference value.
std::complex<double> correlation_quadrature(double t, const BathSpec& spec,
                                            double rel_tol = 1e-11);

// [N-1/N] Pade decomposition of the Bose function: Debye pole plus n_pade
// poles with rates xi_l / beta from the symmetric-tridiagonal eigenproblem.
BathDecomposition pade_decomposition(const BathSpec& spec, int n_pade);

// Matsubara decomposition with rates 2 pi l / beta; test-side cross-check
// for the Pade scheme.
BathDecomposition matsubara_decomposition(const BathSpec& spec, int n_terms);

// Sup-norm mismatch between the exponential sum and the quadrature oracle on
// a uniform grid over [t_min, t_max].
double reconstruction_error(const BathDecomposition& decomp, const BathSpec& spec,
                            double t_min, double t_max, int n_points = 200);

// Collapses terms whose rates agree within rel_tol into single terms,
// preserving the t = 0 value and the time integral of each cluster. Near
// beta omega_c ~ 8 pi the Debye pole and one Bose pole carry large
// near-cancelling weights; merging them removes the cancellation from the
// hierarchy (exact for coinciding rates, second-order in the rate gap
// otherwise) and shrinks the tier depth needed at strong coupling.
BathDecomposition merge_resonant_terms(const BathDecomposition& decomp, double rel_tol = 0.02);

// Bose occupation 1/(e^x - 1) evaluated stably.
double bose_occupation(double x);

}  // namespace sbt
