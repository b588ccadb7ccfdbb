#pragma once

#include <string>
#include <vector>

#include "cmlptr/tensor.hpp"
#include "cmlptr/tsvd.hpp"

namespace cmlptr {

enum class TauMode {
  literal,  ///< 2(|P1|^2|P2|^2 + |P3 S|^2 + |P1|^2 + |P2|^2), unscaled
  safe,     ///< 2(|P1|^2|P2|^2 + |P3 S|^2 + |D_I1|^2 + |D_I2|^2), a true Lipschitz bound
};

enum class ToleranceMode {
  absolute,  ///< stop when max residual <= eps
  relative,  ///< stop when max residual <= eps * |X|_F
};

std::string to_string(TauMode mode);
std::string to_string(ToleranceMode mode);

/// Observations and degradation operators: x = z x_1 P1 x_2 P2, y = z x_3 P3.
struct FusionProblem {
  Tensor3 x;  ///< i1 x i2 x I3 hyperspectral image
  Tensor3 y;  ///< I1 x I2 x i3 multispectral image
  Matrix p1;  ///< i1 x I1
  Matrix p2;  ///< i2 x I2
  Matrix p3;  ///< i3 x I3

  void validate() const;
  Shape3 hssi_shape() const { return {p1.cols(), p2.cols(), p3.cols()}; }
};

struct SolverConfig {
  Index r = 3;
  double gamma = 0.1;
  double rho0 = 1e-3;
  double nu = 1.05;
  double eps = 1e-5;
  ToleranceMode eps_mode = ToleranceMode::absolute;
  int max_iter = 500;
  TauMode tau_mode = TauMode::safe;

  /// Range checks; with a problem, also r <= min(I3, i1 i2).
  void validate() const;
  void validate(const FusionProblem& problem) const;
};

/// Iteration-independent quantities derived once the subspace is known.
struct Operators {
  Matrix s;       ///< I3 x R, orthonormal columns
  Matrix p1t, p2t, st;
  Matrix p3s;     ///< P3 S
  Matrix p3s_t;
  Matrix gram1;   ///< P1^T P1
  Matrix gram2;   ///< P2^T P2
  Matrix gram3;   ///< (P3 S)^T (P3 S)
  Matrix d1, d2, d1t, d2t;
  Matrix dtd1, dtd2;
  double tau = 0.0;
  double tau_literal = 0.0;
  double tau_safe = 0.0;
};

Operators prepare_operators(const FusionProblem& problem, const Matrix& s, TauMode mode);

/// All iterates of the augmented-Lagrangian scheme.
struct SolverState {
  Tensor3 a;         ///< I1 x I2 x R
  Tensor3 g1, g2;    ///< (I1-1) x I2 x R and I1 x (I2-1) x R
  Tensor3 mx;        ///< i1 x i2 x I3
  Tensor3 my;        ///< I1 x I2 x i3
  Tensor3 m1, m2;    ///< shaped like g1, g2
  double rho = 0.0;
  int iter = 0;

  static SolverState zeros(const FusionProblem& problem, Index r, double rho0);
  bool all_finite() const;
};

/// The four Frobenius residuals tested by the stopping rule.
struct Residuals {
  double x = 0.0;
  double y = 0.0;
  double g1 = 0.0;
  double g2 = 0.0;
  double max() const;
};

/// First r left singular vectors of the mode-3 unfolding of x. Each column is
/// signed so that its largest-magnitude entry is positive.
Matrix extract_subspace(const Tensor3& x, Index r);

/// Spectral norm (largest singular value).
double operator_norm(const Matrix& m);

double lipschitz_tau(const Matrix& p1, const Matrix& p2, const Matrix& p3, const Matrix& s,
                     TauMode mode);

/// Quadratic A-subproblem objective L1(a) at the state's G, multipliers and rho.
double objective_l1(const Tensor3& a, const SolverState& state, const FusionProblem& problem,
                    const Operators& ops);

/// Gradient of L1 at state.a.
Tensor3 grad_a(const SolverState& state, const FusionProblem& problem, const Operators& ops);

/// a <- a - grad / tau. Returns |grad|_F.
double step_a(SolverState& state, const FusionProblem& problem, const Operators& ops);

/// G_n-subproblem objective: mode-(3-n) NTPNN of g + rho |g + M_n/rho - a x_n D|_F^2.
double objective_g(const Tensor3& g, const SolverState& state, int n, const Surrogate& psi,
                   const Operators& ops);

/// Exact G_n update through the singular-value prox in the permuted frame.
void step_g(SolverState& state, int n, const Surrogate& psi, const Operators& ops);

Residuals residuals(const SolverState& state, const FusionProblem& problem, const Operators& ops);

/// Adds rho * residual to every multiplier, advances the iteration counter and
/// sets rho = rho0 * nu^iter. Returns the residuals that were applied.
Residuals update_multipliers(SolverState& state, const FusionProblem& problem, const Operators& ops,
                             const SolverConfig& config);

/// Threshold the stopping rule compares the max residual against.
double stop_threshold(const SolverConfig& config, const FusionProblem& problem);

struct IterationRecord {
  int iter = 0;
  Residuals res;
  double rho = 0.0;        ///< penalty used during this iteration
  double objective = 0.0;  ///< NMS-t-CTV of the current spatial tensor
  double grad_norm = 0.0;  ///< |grad L1|_F of the A-step
  double mx_norm = 0.0;
  double my_norm = 0.0;
  double seconds = 0.0;
};

struct KktReport {
  Residuals residuals;
  double residual_limit = 0.0;
  double grad_norm = 0.0;
  double grad_limit = 0.0;
  double subgradient_error = 0.0;  ///< max |u^H M v + psi'(sigma)/2| over retained values
  Index retained_values = 0;
  double subgradient_limit = 1e-4;
  double multiplier_ratio = 0.0;   ///< max over {Mx, My} of final / median norm
  bool residuals_ok = false;
  bool grad_ok = false;
  bool subgradient_ok = false;
  bool multipliers_bounded = false;  ///< reported only, not part of pass
  bool pass = false;
};

struct Diagnostics {
  std::vector<IterationRecord> history;
  int iterations = 0;
  bool converged = false;
  std::string stop_reason;
  TauMode tau_mode = TauMode::safe;
  double tau = 0.0;
  double tau_literal = 0.0;
  double tau_safe = 0.0;
  double threshold = 0.0;
  KktReport kkt;
};

struct SolveResult {
  Tensor3 z_hat;
  Matrix s;
  SolverState state;
  Diagnostics diagnostics;
};

/// Evaluates the KKT conditions at a finished state.
KktReport kkt_check(const SolverState& state, const FusionProblem& problem, const Operators& ops,
                    const SolverConfig& config, const std::vector<IterationRecord>& history);

/// Runs the full fusion. Throws DivergenceError on a non-finite iterate.
SolveResult solve(const FusionProblem& problem, const SolverConfig& config);

}  // namespace cmlptr
