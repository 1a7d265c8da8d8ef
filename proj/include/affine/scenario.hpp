#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "affine/dynamics.hpp"
#include "affine/reduced1d.hpp"
#include "affine/reduced3d.hpp"

namespace affine {

// ---------------------------------------------------------------------------
// Declarative scenarios: config ingestion (JSON with comments), orchestration
// of classical runs and quantum sweeps, deterministic seeding, tabular export
// with embedded provenance hashes.
// ---------------------------------------------------------------------------

enum class ScenarioKind {
    ClassicalTrajectory,
    GeodesicCompare,
    ConservationAudit,
    Boundedness2D,
    Spectrum2D,
    SpectrumQpm,
    SpectrumPolar,
    Operator3DCheck,
};

struct ScenarioConfig {
    ScenarioKind kind = ScenarioKind::ClassicalTrajectory;

    // Model block.
    std::string model = "affine-affine";  // dalembert | affine-affine | affine-metric | metric-affine
    int n = 2;
    double mass = 1.0;
    double I = 0.0, A = 1.0, B = 0.0;

    // Potential block.
    std::string potential = "none";  // none | dilatation-harmonic | binary-shear | two-dim-preset | qpm-family
    double kappa = 1.0;
    double pot_a = 0.0, pot_b = 0.0, pot_c = 0.0;
    std::vector<double> shear_k;  // row-major n x n spring table

    // Classical numerics / initial conditions.
    std::string scheme = "midpoint";  // midpoint | rk4
    double dt = 1e-3;
    int steps = 10000;
    int store_every = 10;
    bool incompressible = false;
    bool random_init = true;  // otherwise phi0/P0/x0/p0 below
    std::vector<double> x0, p0, phi0, P0;  // row-major matrices

    // Quantum numerics.
    double hbar = 1.0;
    int grid_n = 2000;
    double box = 60.0;
    int levels = 5;
    int m_lo = -3, m_hi = 3, n_lo = -3, n_hi = 3;  // channel sweeps
    int ch_m = 0, ch_n = 0;                        // single channel
    double s = 0.0, j = 0.0;                       // 3D channel
    int grid3_n = 8;
    double grid3_lo = -1.0, grid3_hi = 1.0;

    // Boundedness sweep.
    double p_lo = -2.0, p_hi = 2.0;
    int p_steps = 5;

    std::uint64_t seed = 0;
    std::string out;  // default output path (may be overridden by the CLI)
};

// Parse + validate a JSON-with-comments config document. Violated module
// preconditions are rethrown as ValidationError with the offending field path.
ScenarioConfig load_config(const std::string& text);
ScenarioConfig load_config_file(const std::string& path);

// Canonical re-serialization (sorted keys, defaults filled); two configs are
// identical iff their canonical forms (and hence hashes) match.
std::string emit_config(const ScenarioConfig& config);
std::uint64_t config_hash(const ScenarioConfig& config);

// FNV-1a 64-bit hash of a byte string.
std::uint64_t fnv1a(const std::string& bytes);

struct ResultTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    // Provenance block.
    std::string version = "1.0.0";
    std::uint64_t cfg_hash = 0;
    std::uint64_t seed = 0;
};

// Hash of the table payload (header + rows in canonical text form).
std::uint64_t table_hash(const ResultTable& table);

ResultTable run_scenario(const ScenarioConfig& config);

enum class ExportFormat { CSV, JSON };

// Atomic export (temp file + rename). Non-finite cells abort with
// ValidationError; IO problems surface as IOFailure with the path.
void export_table(const ResultTable& table, const std::string& path, ExportFormat format);

// Parse a previously exported table (format detected from the content).
ResultTable import_table(const std::string& path);

// Re-verify the embedded table hash of an export; returns true when intact
// and fills `message` with a human-readable verdict.
bool audit_table(const std::string& path, std::string& message);

}  // namespace affine
