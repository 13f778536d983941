// tomography.hpp — reconstruction of the dynamical map from basis
// propagations, the exact time-local generator L_t = Phidot Phi^{-1}, and its
// minimal-dissipation split into the effective Hamiltonian K_S(t) and a
// traceless-Lindblad dissipator.

#pragma once

#include <array>
#include <optional>
#include <vector>

#include "sbthermo/bath.hpp"
#include "sbthermo/hierarchy.hpp"
#include "sbthermo/pauli.hpp"

namespace sbt {

struct TransferSeries {
    std::vector<double> times;
    std::vector<Super> phi;       // dynamical map, orthonormal Pauli basis
    std::vector<Super> phi_dot;   // exact derivative assembled from heom_rhs
    double hermiticity_residual{0.0};  // max ||rho - rho^dag|| over basis runs
    double trace_residual{0.0};        // max deviation of the identity row

    // State trajectory for an arbitrary initial state by linearity.
    std::vector<TrajectoryPoint> state_series(const Mat2& rho0) const;
};

// Propagates the four basis initial states {I/2, (I+sx)/2, (I+sy)/2,
// (I+sz)/2} through the hierarchy and assembles Phi_t and Phidot_t.
TransferSeries propagate_basis(const SystemSpec& sys, const BathDecomposition& decomp, int l_max,
                               const PropagateOptions& opts,
                               CouplingConvention convention = CouplingConvention::standard);

struct GeneratorSeries {
    std::vector<double> times;
    std::vector<Super> gen;        // L_t
    std::vector<double> condition; // cond(Phi_t)
    // Set when cond(Phi) exceeded the bound; series is truncated there.
    std::optional<double> truncated_at;
};

// L_t = Phidot_t Phi_t^{-1}. Near-singular maps (condition number above
// `cond_bound`) truncate the series with a diagnostic instead of regularizing.
GeneratorSeries generator(const TransferSeries& series, double cond_bound = 1e8);

// Choi matrix of a (Hermiticity-preserving) generator, built from its action
// on matrix units; Hermitian by construction of the input.
Choi choi_of_generator(const Super& gen);

struct PseudoKraus {
    std::vector<double> theta;  // real eigenvalues, sorted by descending |theta|
    std::vector<Mat2> ops;      // unit-normalized, deterministic phase
};

// Eigendecomposition of the Choi matrix; terms with |theta| below a tiny
// relative threshold are dropped (a zero Choi yields an empty set).
PseudoKraus pseudo_kraus(const Choi& choi);

// K_S = -(i/4) sum_k theta_k (Tr{E_k} E_k^dag - Tr{E_k^dag} E_k).
Mat2 effective_hamiltonian(const PseudoKraus& kraus);

struct MinimalDissipator {
    std::vector<double> theta;
    std::vector<Mat2> lindblad;  // traceless parts L_k = E_k - (Tr E_k / 2) I
    double reconstruction_residual{0.0};  // ||L_in - (-i[K,.] + D)||_F
};

MinimalDissipator minimal_dissipator(const PseudoKraus& kraus, const Mat2& k_s, const Super& gen);

// || L_t[ e^{-beta K_S} / Z ] ||_F, the instantaneous-Gibbs fixed-point
// diagnostic behind the second-law condition.
double gibbs_fixed_point_residual(const Mat2& k_s, double beta, const Super& gen);

struct GeneratorSnapshot {
    double t;
    Super gen;
    Choi choi;
    PseudoKraus kraus;
    Mat2 k_s;
    std::array<double, 4> theta{};  // padded for tabular output
    double kraus_constraint;        // ||sum theta E^dag E||_F
    double reconstruction_residual;
    double gibbs_residual;
};

struct SnapshotSeries {
    std::vector<GeneratorSnapshot> snapshots;
    std::vector<Mat2> k_s() const;
    std::vector<double> times() const;
};

// Full per-time analysis of a generator series.
SnapshotSeries analyze_generator(const GeneratorSeries& series, double beta);

// Superoperator of rho -> -i[K, rho] + sum_k theta_k (L rho L^dag -
// {L^dag L, rho}/2); used by the reconstruction checks.
Super lindblad_superop(const Mat2& k, const std::vector<double>& theta,
                       const std::vector<Mat2>& lindblad);

}  // namespace sbt
