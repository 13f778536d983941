// hierarchy.hpp — construction and propagation of the hierarchical equations
// of motion: auxiliary density operator (ADO) index table with precomputed
// tier-coupling links, right-hand side, fixed/adaptive integrators, a
// convergence scan, and binary checkpoints.

#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbthermo/bath.hpp"
#include "sbthermo/pauli.hpp"

namespace sbt {

struct SystemSpec {
    double epsilon{0.0};  // bias
    double delta{0.0};    // tunneling coupling

    // H_S = -epsilon sigma_z + delta sigma_x
    Mat2 hamiltonian() const;
};

enum class CouplingConvention {
    standard,       // up: -i[sz, .], down: -i n_l (eta sz . - eta* . sz)
    paper_literal,  // up: -{sz, .},  down: -  n_l (eta sz . - eta* . sz)
};

enum class IntegratorKind { rk4, rk45 };

struct PropagationDiverged : std::runtime_error {
    explicit PropagationDiverged(double t)
        : std::runtime_error("HEOM propagation diverged at t = " + std::to_string(t)), time(t) {}
    double time;
};

// Index table over occupation vectors with tier <= l_max. Neighbor links and
// coupling factors are precomputed so the RHS is pure array arithmetic. ADOs
// are stored rescaled by prod_l (n_l! |eta_l|^{n_l})^{-1/2}; tier 0 is the
// physical reduced density matrix either way.
struct HierarchyTable {
    int n_terms{0};
    int l_max{0};
    CouplingConvention convention{CouplingConvention::standard};
    std::vector<BathTerm> terms;

    std::size_t n_ados{0};
    std::vector<std::uint8_t> occupations;        // n_ados * n_terms
    std::vector<std::complex<double>> gamma_tot;  // per ADO

    // Couplings are stored as compact links into a small factor table indexed
    // by (term, direction, occupancy); the contribution of a link with
    // factors (p, m) to d(ado)/dt is p on the diagonal and m on the
    // off-diagonal entries of the neighbor block.
    struct Link {
        std::uint32_t neighbor;  // ADO index
        std::uint32_t factor;    // index into factor_p / factor_m
    };
    std::vector<std::int64_t> link_offset;  // CSR, size n_ados + 1
    std::vector<Link> links;
    std::vector<std::complex<double>> factor_p;
    std::vector<std::complex<double>> factor_m;

    std::size_t state_size() const { return 4 * n_ados; }
};

// Enumerates the retained index set and precomputes couplings.
// Throws std::length_error if the retained set exceeds max_ados.
HierarchyTable build_hierarchy(const BathDecomposition& decomp, int l_max,
                               CouplingConvention convention = CouplingConvention::standard,
                               std::size_t max_ados = 4'000'000);

struct HierarchyState {
    double time{0.0};
    std::vector<std::complex<double>> data;  // 4 * n_ados, column-major 2x2 blocks

    static HierarchyState initial(const HierarchyTable& table, const Mat2& rho0);
    Mat2 tier0() const;
};

// d(state)/dt for the full hierarchy. Pure function; `out` must have
// table.state_size() entries and must not alias `in`. Parallelized over ADOs
// with one writer per output slot, so results are identical for any worker
// count.
void heom_rhs(const HierarchyTable& table, const SystemSpec& sys,
              std::span<const std::complex<double>> in,
              std::span<std::complex<double>> out);

struct TrajectoryPoint {
    double t;
    Mat2 rho;      // reduced density matrix
    Mat2 rho_dot;  // exact tier-0 derivative from heom_rhs
};

struct PropagateOptions {
    double dt{1e-3};
    double t_final{10.0};
    int output_stride{1};  // record every `output_stride`-th step
    IntegratorKind integrator{IntegratorKind::rk4};
    double rk45_tol{1e-10};
    std::filesystem::path checkpoint_path{};  // optional, written at the end
};

struct Trajectory {
    std::vector<TrajectoryPoint> points;
    std::vector<double> sigma_z() const;
};

// Propagates in place and returns tier-0 snapshots on the output grid
// (t = k * dt * output_stride, including t_final). Throws
// PropagationDiverged on norm explosion or non-finite values.
Trajectory propagate(HierarchyState& state, const SystemSpec& sys, const HierarchyTable& table,
                     const PropagateOptions& opts);

// Convenience: build + propagate from a fresh factorized initial state.
Trajectory propagate_fresh(const SystemSpec& sys, const BathDecomposition& decomp, int l_max,
                           const Mat2& rho0, const PropagateOptions& opts,
                           CouplingConvention convention = CouplingConvention::standard);

struct ScanPoint {
    int l_max;
    int n_pade;
    double dt;
};

struct ScanComparison {
    ScanPoint coarse;
    ScanPoint fine;
    double sup_diff;  // sup_t |<sz>_coarse - <sz>_fine|
};

struct ScanResult {
    bool converged{false};
    ScanPoint selected{};
    double achieved{0.0};
    std::vector<ScanComparison> report;
};

struct ScanOptions {
    std::vector<int> l_values;      // ascending
    std::vector<int> n_pade_values; // ascending
    std::vector<double> dt_values;  // descending (coarse to fine)
    double tolerance{1e-3};
    double t_final{20.0};
    int n_output{200};
    Mat2 rho0 = (Mat2() << 1, 0, 0, 0).finished();
    std::size_t max_ados = 4'000'000;
};

// Finds the smallest settings whose <sigma_z> trajectory differs from the
// next-finer settings by less than `tolerance` in sup norm.
ScanResult convergence_scan(const SystemSpec& sys, const BathSpec& spec, const ScanOptions& opts);

// Versioned binary checkpoint: header (system, decomposition, depth,
// convention, time) followed by the flat ADO array.
void save_checkpoint(const std::filesystem::path& path, const SystemSpec& sys,
                     const HierarchyTable& table, const HierarchyState& state);

struct Checkpoint {
    SystemSpec sys;
    BathDecomposition decomp;
    int l_max;
    CouplingConvention convention;
    HierarchyState state;
};

Checkpoint load_checkpoint(const std::filesystem::path& path);

// Worker-count override honored by the RHS (SBTHERMO_WORKERS, else OpenMP
// defaults). Returns the value in effect.
int effective_workers();

}  // namespace sbt
