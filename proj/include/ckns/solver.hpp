#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ckns/pressure.hpp"
#include "ckns/snapshot.hpp"

namespace ckns {

struct SolverConfig {
    Grid grid;
    double dt = 0.0; // 0 selects auto (CFL) stepping
    double dt_max = 0.05;
    double cfl_number = 0.4;
    double t_start = -1.0;
    double t_end = 0.0;
    GradPhi gradphi;
    enum class Positivity { Clip, Reject } positivity = Positivity::Clip;
    bool dealias = true;
    int output_stride = 1;
    // optional denser output cadence for the diagnostic tail of a run
    double dense_output_from = 1.0; // internal time; 1.0 (past t_end) disables
    int dense_output_stride = 1;

    void validate() const;
};

struct StepInfo {
    double mass_pre_clip = 0.0;  // integral of n after the update, before positivity
    double min_n_pre_clip = 0.0;
    double min_c_pre_clip = 0.0;
    double clipped_mass = 0.0;   // mass added to n by clipping
};

/// One IMEX step: exact Fourier integrating factor for the unit-viscosity
/// diffusion, Heun (2nd order) for advection, chemotaxis flux, consumption
/// and buoyancy; velocity projected divergence-free; pressure recomputed.
State step(const State& s, double dt, const SolverConfig& cfg, StepInfo* info = nullptr);

/// cfl * h / max(||u||_inf + ||grad c||_inf, eps_floor), capped by dt_max.
double cfl_dt(const State& s, const SolverConfig& cfg);

constexpr double kCflEpsFloor = 1e-8;

struct MonitorRow {
    double t = 0.0;
    double mass = 0.0;
    double min_n = 0.0; // pre-clip
    double min_c = 0.0;
    double max_c = 0.0;
    double divergence = 0.0; // max |div u|
    double U = 0.0;          // Definition-1.3 energy at this time
    double intV = 0.0;       // time integral of V from the run start
    double clipped_mass_total = 0.0;
};

struct RunResult {
    SnapshotSeries series;
    std::vector<MonitorRow> monitor;
    bool aborted = false;
    std::string abort_reason;
    int steps_taken = 0;

    std::string monitor_tsv() const;
};

/// Advance from the initial state over [t_start, t_end]. Times are relabeled
/// internally so the run starts at t = -1 (a pure shift; a unit-duration run
/// ends at the paper's t = 0).
RunResult run(const SolverConfig& cfg, const State& initial);

// --- analytic initial-condition presets --------------------------------------

struct PresetParams {
    std::string name = "quiescent"; // quiescent | taylor_green | perturbed_uniform | gaussian_blob
    double n0 = 0.0;
    double c0 = 1.0;
    double amplitude = 0.0; // velocity amplitude (taylor_green) or n perturbation
    int mode = 1;
    double sigma = 0.1;   // gaussian_blob width
    Vec3 center{0, 0, 0}; // gaussian_blob center
    std::uint64_t seed = 0; // perturbed_uniform random phases (0 = plain sinusoid)
};

/// Samples the preset, projects the velocity divergence-free and computes the
/// consistent pressure so State invariants hold.
State make_initial_state(const Grid& g, const PresetParams& p, const GradPhi& gradphi);

} // namespace ckns
