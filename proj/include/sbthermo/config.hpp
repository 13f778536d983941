// config.hpp — flat key-value run configuration with strict unknown-key
// rejection, the paper-regime scenario presets, and a stable config hash for
// provenance.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sbthermo/hierarchy.hpp"
#include "sbthermo/pauli.hpp"

namespace sbt {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class InitialStateKind { ground, excited, plus, mixed, custom };

struct RunConfig {
    std::string preset_name = "custom";

    // system (units of omega_c throughout)
    double epsilon{0.0};
    double delta{0.2};

    // bath
    double alpha{0.3};
    double beta{25.0};
    int n_pade{8};

    // heom
    int l_max{5};
    double dt{0.005};
    double t_final{50.0};
    IntegratorKind integrator{IntegratorKind::rk4};
    CouplingConvention convention{CouplingConvention::standard};
    std::size_t max_ados{4'000'000};

    // initial state
    InitialStateKind initial_state{InitialStateKind::ground};
    double rho00{1.0};  // custom state parameters; rho11 = 1 - rho00
    double rho01_re{0.0};
    double rho01_im{0.0};

    // output
    std::filesystem::path output_directory{"run"};
    int grid_stride{2};

    // tomography
    double cond_bound{1e8};

    // scan defaults (used by the `scan` subcommand)
    double scan_tolerance{1e-3};
    double scan_t_final{20.0};

    static RunConfig from_preset(const std::string& name);
    static RunConfig from_file(const std::filesystem::path& path);
    static std::vector<std::string> preset_names();

    void validate() const;

    SystemSpec system() const { return {epsilon, delta}; }
    BathSpec bath() const { return {alpha, 1.0, beta}; }
    Mat2 initial_density_matrix() const;

    // Resolved canonical "key = value" lines (sorted) and the FNV-1a hash
    // over them; equal configs hash equally independent of input formatting.
    std::vector<std::string> canonical_lines() const;
    std::uint64_t hash() const;
};

}  // namespace sbt
