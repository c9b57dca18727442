#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "hartreelab/grid.hpp"
#include "hartreelab/groundstate.hpp"
#include "hartreelab/params.hpp"
#include "hartreelab/riesz.hpp"

namespace hartreelab {

/// Exact linear flow e^{-itK_λ} from the eigendecomposition of the
/// symmetrized operator W^{-1/2} L W^{-1/2} = V Λ Vᵀ.
struct Propagator {
  GridPtr grid;
  double lambda = 0.0;
  double dt = 0.0;
  Eigen::MatrixXd V;
  Eigen::VectorXd eigenvalues;
  Eigen::VectorXd sqrt_w;

  /// Coordinates c = Vᵀ W^{1/2} u; Σ|c|² is the mass and Σ λ_k |c_k|² the
  /// quadratic form.
  Eigen::VectorXcd to_modes(const Eigen::VectorXcd& u) const;
  Eigen::VectorXcd from_modes(const Eigen::VectorXcd& c) const;
  /// e^{-i t K_λ} u for any real t.
  RadialField apply(const RadialField& u, double t) const;
  RadialField apply(const RadialField& u) const { return apply(u, dt); }
};

/// Throws EigFailure if the eigensolver does not converge.
Propagator build_propagator(const GridPtr& grid, const ModelParams& params, double dt);

struct EvolutionState {
  RadialField u;
  double t = 0.0;
  long step_count = 0;
  bool diverged = false;
};

/// u · exp(-i ε W h). Leaves |u| unchanged.
RadialField nonlinear_phase(const RadialField& u, const ModelParams& params, const RieszKernel& kernel, double h);

/// One Strang step: half nonlinear phase, exact linear flow, half phase.
/// Marks the state diverged when max|u| exceeds `overflow`.
EvolutionState step(const EvolutionState& state, double dt, const ModelParams& params, const RieszKernel& kernel,
                    const Propagator& propagator, double overflow = 1e150);

/// Ground-state reference values for the scale-invariant ratios.
struct GroundStateRef {
  double E = 0.0;
  double grad = 0.0;  ///< ‖√K_λ φ‖
  double P = 0.0;
};

GroundStateRef make_reference(const GroundStateResult& ground, const ModelParams& params, const RieszKernel& kernel);

struct DiagnosticsRecord {
  double t = 0.0;
  double M = 0.0;
  double E = 0.0;
  double P = 0.0;
  double I = 0.0;
  double ME = 0.0;
  double MG = 0.0;
  double MP = 0.0;
  double gradnorm = 0.0;
  double dt = 0.0;
};

DiagnosticsRecord diagnose(const RadialField& u, double t, double dt, const ModelParams& params,
                           const RieszKernel& kernel, const std::optional<GroundStateRef>& ref = std::nullopt);

struct RunOptions {
  double T = 1.0;
  double dt = 1e-3;
  int cadence = 10;  ///< diagnostics every `cadence` accepted steps
  bool adaptive = true;
  double energy_jump = 1e-5;  ///< halve dt when |ΔE| exceeds this times |E|
  double dt_min = 1e-9;
  double overflow = 1e150;
  double boundary_fraction = 0.9;
  double boundary_tol = 1e-6;  ///< growth of the outer mass, relative to M
  bool store_fields = false;
  long max_steps = 5'000'000;
};

enum class RunVerdict { Completed, BlowupDetected, Diverged, BoundaryContaminated, StepLimit };
const char* to_string(RunVerdict v);

struct RunResult {
  std::vector<DiagnosticsRecord> trajectory;
  std::vector<RadialField> fields;  ///< snapshots matching `trajectory` when stored
  EvolutionState final_state;
  RunVerdict verdict = RunVerdict::Completed;
  double t_star = 0.0;  ///< time at which dt collapsed or the run stopped
  double min_dt = 0.0;
};

/// Integrates to opts.T. A zero initial field yields a zero trajectory.
RunResult run(const RadialField& u0, const ModelParams& params, const RieszKernel& kernel, const RunOptions& opts,
              const std::optional<GroundStateRef>& ref = std::nullopt);

/// Mass in r > fraction·R_max.
double outer_mass(const RadialField& u, double fraction);

enum class BlowupVerdict { BlowupDetected, Bounded, Indeterminate };
const char* to_string(BlowupVerdict v);

struct BlowupThresholds {
  double growth = 10.0;
  double bounded = 2.0;
  double dt_min = 1e-9;
};

/// BlowupDetected when the gradient norm reaches growth× its initial value
/// and some step size fell below dt_min; Bounded when it stays within
/// bounded× and dt never collapsed; Indeterminate otherwise.
BlowupVerdict blowup_detector(const std::vector<DiagnosticsRecord>& trajectory, const BlowupThresholds& th = {});

/// ‖e^{i t2 K} u(t2) - e^{i t1 K} u(t1)‖ in H¹_λ (mass plus quadratic form).
double scattering_diagnostic(const RadialField& u1, double t1, const RadialField& u2, double t2,
                             const Propagator& propagator);

enum class Prediction { BoundedPredicted, BlowupPredicted, OutsideTheory };
const char* to_string(Prediction p);

struct Classification {
  Prediction prediction = Prediction::OutsideTheory;
  double ME = 0.0;
  double MG = 0.0;
  double MP = 0.0;
  double t1 = 0.0;    ///< C^{-1/(p-1)}
  double f_t1 = 0.0;  ///< ((p-1)/p) C^{-1/(p-1)}
};

/// Threshold comparison for focusing data; ratios within `tie` of 1 count as
/// on the threshold. Throws PreconditionError unless ε = -1.
Classification classify(const RadialField& u0, const GroundStateResult& ground, const ModelParams& params,
                        const RieszKernel& kernel, double tie = 1e-9);

}  // namespace hartreelab
