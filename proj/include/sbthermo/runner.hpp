// runner.hpp — pipeline orchestration and persistence: executes
// hierarchy -> tomography -> thermo for a configuration, writes the tabular
// artifact bundle with provenance headers, the validation suite, and the
// plot-script emitter.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "sbthermo/config.hpp"
#include "sbthermo/thermo.hpp"
#include "sbthermo/tomography.hpp"

namespace sbt {

struct PipelineResult {
    TransferSeries transfer;
    GeneratorSeries generators;
    SnapshotSeries snapshots;
    std::vector<TrajectoryPoint> states;  // for the configured initial state
    ThermoSeries thermo;
};

// Runs the full pipeline in memory (no files).
PipelineResult run_pipeline(const RunConfig& cfg);

// Executes the pipeline and writes trajectory.dat, ks.dat, thermo.dat,
// report.txt and provenance.txt into cfg.output_directory. Reruns with an
// equal config are byte-identical. Returns the process exit code.
int run_scenario(const RunConfig& cfg, std::ostream& log);

// Oracle + invariant suite (closed system, pure dephasing, weak-coupling
// TCL2); prints one line per check, returns nonzero on any failure.
int run_validation(std::ostream& log, bool fast = false);

// Convergence scan around the configured settings; writes scan.txt into the
// output directory and returns nonzero if nothing in the grid converges.
int run_scan(const RunConfig& cfg, std::ostream& log);

// Emits plot_ks.py, plot_work_heat.py, plot_entropy.py into an existing run
// directory; fails (nonzero) listing any missing tables.
int emit_plots(const std::filesystem::path& run_dir, std::ostream& log);

const char* version_string();

}  // namespace sbt
