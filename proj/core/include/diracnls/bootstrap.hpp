#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "diracnls/errors.hpp"
#include "diracnls/fields.hpp"
#include "diracnls/model.hpp"
#include "diracnls/perturbation.hpp"

namespace diracnls {

enum class ShiftMode { Zero, RealE1 };

std::string to_string(ShiftMode mode);
ShiftMode parse_shift_mode(const std::string& name);

struct BootstrapConfig {
  double epsilon = 0.04;
  /// Relative tolerance of the correction and energy fixed points.
  double inner_tol = 1e-12;
  /// Absolute L2 tolerance between successive outer fields.
  double outer_tol = 1e-11;
  /// Certification threshold for |Im E'| relative to eps^4 |I_c_int|.
  double pseudo_tol = 1e-3;
  int max_inner = 500;
  int max_outer = 200;
  double damping = 0.5;
  ShiftMode shift_mode = ShiftMode::RealE1;
  int beta_samples = 64;
  double bisection_tol = 1e-12;

  /// Throws DomainError for non-positive tolerances or caps.
  void validate() const;
};

/// Converged (pseudo-)eigenpair of the nonlinear problem.
struct ModeResult {
  ParameterPair pair;
  double epsilon = 0.0;
  /// eps (a phi_a + b phi_b) + correction
  BlochField phi;
  BlochField correction;
  /// E' = E - E0
  cd E_shift;
  double residual = 0.0;
  double im_energy = 0.0;
  /// |b <phi_a, v phi> - a <phi_b, v phi>| / eps
  double consistency_defect = 0.0;
  int inner_iterations = 0;
  int outer_iterations = 0;
  std::vector<double> outer_steps;
  bool converged = false;
  bool is_true_eigenpair = false;

  double energy(double E0) const { return E0 + E_shift.real(); }
  /// Ratios of successive outer steps.
  std::vector<double> contraction_ratios() const;
};

struct CorrectionResult {
  BlochField field;
  int iterations = 0;
  double contraction = 0.0;
};

enum class BifurcationStatus { Ok, PredictionVoid };

std::string to_string(BifurcationStatus status);

struct CurvePoint {
  double beta = 0.0;
  double im_energy = 0.0;
  double re_energy = 0.0;
};

/// Raised when the imaginary-energy scan does not show exactly six sign changes.
class BifurcationCountError : public Error {
 public:
  BifurcationCountError(const std::string& what, int sign_changes, std::vector<CurvePoint> curve)
      : Error(what), sign_changes_(sign_changes), curve_(std::move(curve)) {}

  int sign_changes() const noexcept { return sign_changes_; }
  const std::vector<CurvePoint>& curve() const noexcept { return curve_; }

 private:
  int sign_changes_;
  std::vector<CurvePoint> curve_;
};

struct BifurcationResult {
  BifurcationStatus status = BifurcationStatus::Ok;
  double epsilon = 0.0;
  /// a pole, b pole, then the six equator modes by ascending beta.
  std::vector<ModeResult> modes;
  std::vector<CurvePoint> curve;
};

struct Certificate {
  double residual = 0.0;
  double im_energy = 0.0;
  double parallel_defect = 0.0;
  double orthogonality = 0.0;
  bool residual_ok = false;
  bool energy_ok = false;
  bool parallel_ok = false;
  bool passed = false;
};

struct UniquenessReport {
  int restarts = 0;
  double max_distance = 0.0;
  double tolerance = 0.0;
  bool unique = true;
  /// ||d correction|| / (|da| + |db|) for a nearby pair; NaN when not requested.
  double lipschitz_ratio = 0.0;
};

struct SeparabilitySample {
  double theta = 0.0;
  double best_phase = 0.0;
  double min_defect = 0.0;
  double landscape = 0.0;
  bool attainable = false;
};

struct SeparabilityReport {
  std::vector<SeparabilitySample> samples;
  /// min over off-equator, off-pole samples of min_defect / (eps^2 landscape).
  double fitted_constant = 0.0;
  double epsilon = 0.0;
};

/// The bootstrap construction over a fixed workspace and perturbation report.
class BootstrapSolver {
 public:
  BootstrapSolver(std::shared_ptr<const Workspace> workspace, PerturbationReport report);
  explicit BootstrapSolver(std::shared_ptr<const Workspace> workspace);

  const Workspace& workspace() const { return *ws_; }
  const std::shared_ptr<const Workspace>& workspace_ptr() const { return ws_; }
  const PerturbationReport& report() const { return report_; }

  /// Solves (L - E1) c + M_perp[v(|phi_t|^2) c] = -M_perp[v(|phi_t|^2) eps u] by Picard sweeps.
  CorrectionResult orthogonal_correction(const BlochField& phi_t, double E1_real, const ParameterPair& pair,
                                         const BootstrapConfig& config,
                                         const BlochField* initial = nullptr) const;

  /// Inner damped fixed point for E1 at frozen phi_t; returns E1 and the matching correction.
  std::pair<cd, CorrectionResult> consistency_energy(const BlochField& phi_t, const BlochField& correction,
                                                     const ParameterPair& pair, const BootstrapConfig& config,
                                                     std::optional<cd> initial = std::nullopt) const;

  /// Outer bootstrap iteration for any pair; warm starts from `warm` when given.
  ModeResult solve(const ParameterPair& pair, const BootstrapConfig& config, const ModeResult* warm = nullptr) const;

  ModeResult bootstrap_polar(bool a_pole, const BootstrapConfig& config) const;
  ModeResult bootstrap_equator(double beta, const BootstrapConfig& config, const ModeResult* warm = nullptr) const;

  /// Curve of Im E' over beta_samples points of [-pi, pi).
  std::vector<CurvePoint> scan_curve(const BootstrapConfig& config, std::vector<ModeResult>* modes = nullptr) const;
  BifurcationResult find_bifurcation_modes(const BootstrapConfig& config) const;

  /// ||(H + v(|phi|^2) - E) phi|| / ||phi||
  double residual(const BlochField& phi, double E) const;
  Certificate certify_mode(const ModeResult& mode, const BootstrapConfig& config) const;

  /// Rotated copy of an equator mode, re-gauged so that a stays real positive.
  ModeResult rotate_mode(const ModeResult& mode) const;

  UniquenessReport uniqueness_probe(const ModeResult& mode, const BootstrapConfig& config, int n_restarts,
                                    double perturbation_scale, std::uint64_t seed,
                                    std::optional<ParameterPair> nearby = std::nullopt) const;

  SeparabilityReport radial_separability_probe(const BootstrapConfig& config, const std::vector<double>& theta_grid,
                                               int n_phase = 12) const;

 private:
  struct Frozen;
  Frozen freeze(const BlochField& phi_t, const ParameterPair& pair, double epsilon) const;
  CorrectionResult solve_correction(const Frozen& fz, double E1_real, const BootstrapConfig& config,
                                    const BlochField& initial) const;
  cd project_energy(const Frozen& fz, const BlochField& correction) const;
  std::pair<cd, CorrectionResult> energy_fixed_point(const Frozen& fz, const BlochField& correction,
                                                     const BootstrapConfig& config, cd E1) const;
  ModeResult run(const ParameterPair& pair, const BootstrapConfig& config, BlochField correction,
                 std::optional<cd> E1) const;
  void finish(ModeResult& mode, const BootstrapConfig& config) const;

  std::shared_ptr<const Workspace> ws_;
  PerturbationReport report_;
};

PerturbationReport compute_report(const Workspace& workspace);

}  // namespace diracnls
