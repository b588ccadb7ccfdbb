#include "cmlptr/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "cmlptr/errors.hpp"
#include "cmlptr/fft.hpp"
#include "cmlptr/regularizer.hpp"
#include "cmlptr/tensor_ops.hpp"

namespace cmlptr {

std::string to_string(TauMode mode) { return mode == TauMode::literal ? "literal" : "safe"; }

std::string to_string(ToleranceMode mode) {
  return mode == ToleranceMode::absolute ? "absolute" : "relative";
}

void FusionProblem::validate() const {
  const Shape3 big = hssi_shape();
  if (x.shape() != Shape3{p1.rows(), p2.rows(), big[2]}) {
    throw DimensionError("HSI shape " + to_string(x.shape()) + " does not match P1/P2/P3");
  }
  if (y.shape() != Shape3{big[0], big[1], p3.rows()}) {
    throw DimensionError("MSI shape " + to_string(y.shape()) + " does not match P1/P2/P3");
  }
  if (big[0] < 2 || big[1] < 2) throw DimensionError("spatial extents must be at least 2");
}

void SolverConfig::validate() const {
  if (r < 1) throw ConfigError("r must be positive");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError("gamma must be positive");
  if (!(rho0 > 0.0) || !std::isfinite(rho0)) throw ConfigError("rho0 must be positive");
  if (!(nu > 1.0) || !std::isfinite(nu)) throw ConfigError("nu must exceed 1");
  if (!(eps > 0.0) || !std::isfinite(eps)) throw ConfigError("eps must be positive");
  if (max_iter < 1) throw ConfigError("max_iter must be positive");
}

void SolverConfig::validate(const FusionProblem& problem) const {
  validate();
  const Index limit = std::min(problem.x.dim(3), problem.x.dim(1) * problem.x.dim(2));
  if (r > limit) {
    throw ConfigError("r = " + std::to_string(r) + " exceeds min(I3, i1*i2) = " + std::to_string(limit));
  }
}

double Residuals::max() const { return std::max({x, y, g1, g2}); }

Matrix extract_subspace(const Tensor3& x, Index r) {
  const Index limit = std::min(x.dim(3), x.dim(1) * x.dim(2));
  if (r < 1 || r > limit) {
    throw ArgumentError("subspace dimension " + std::to_string(r) + " outside [1, " +
                        std::to_string(limit) + "]");
  }
  const Matrix unfolded = unfold(x, 3);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(unfolded, Eigen::ComputeThinU);
  if (svd.info() != Eigen::Success) throw FactorizationError("SVD of the mode-3 unfolding failed");
  Matrix s = svd.matrixU().leftCols(r);
  for (Index c = 0; c < r; ++c) {
    Index at = 0;
    s.col(c).cwiseAbs().maxCoeff(&at);
    if (s(at, c) < 0.0) s.col(c) *= -1.0;
  }
  return s;
}

double operator_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

double lipschitz_tau(const Matrix& p1, const Matrix& p2, const Matrix& p3, const Matrix& s,
                     TauMode mode) {
  if (p3.cols() != s.rows()) throw DimensionError("P3 and S are not conformable");
  const double n1 = std::pow(operator_norm(p1), 2);
  const double n2 = std::pow(operator_norm(p2), 2);
  const double n3 = std::pow(operator_norm(p3 * s), 2);
  if (mode == TauMode::literal) return 2.0 * (n1 * n2 + n3 + n1 + n2);
  const double d1 = std::pow(operator_norm(diff_matrix(p1.cols())), 2);
  const double d2 = std::pow(operator_norm(diff_matrix(p2.cols())), 2);
  return 2.0 * (n1 * n2 + n3 + d1 + d2);
}

Operators prepare_operators(const FusionProblem& problem, const Matrix& s, TauMode mode) {
  Operators ops;
  ops.s = s;
  ops.st = s.transpose();
  ops.p1t = problem.p1.transpose();
  ops.p2t = problem.p2.transpose();
  ops.p3s = problem.p3 * s;
  ops.p3s_t = ops.p3s.transpose();
  ops.gram1 = ops.p1t * problem.p1;
  ops.gram2 = ops.p2t * problem.p2;
  ops.gram3 = ops.p3s_t * ops.p3s;
  ops.d1 = diff_matrix(problem.p1.cols());
  ops.d2 = diff_matrix(problem.p2.cols());
  ops.d1t = ops.d1.transpose();
  ops.d2t = ops.d2.transpose();
  ops.dtd1 = ops.d1t * ops.d1;
  ops.dtd2 = ops.d2t * ops.d2;
  ops.tau_literal = lipschitz_tau(problem.p1, problem.p2, problem.p3, s, TauMode::literal);
  ops.tau_safe = lipschitz_tau(problem.p1, problem.p2, problem.p3, s, TauMode::safe);
  ops.tau = mode == TauMode::literal ? ops.tau_literal : ops.tau_safe;
  return ops;
}

SolverState SolverState::zeros(const FusionProblem& problem, Index r, double rho0) {
  const Shape3 big = problem.hssi_shape();
  SolverState st;
  st.a = Tensor3({big[0], big[1], r});
  st.g1 = Tensor3({big[0] - 1, big[1], r});
  st.g2 = Tensor3({big[0], big[1] - 1, r});
  st.mx = Tensor3(problem.x.shape());
  st.my = Tensor3(problem.y.shape());
  st.m1 = st.g1;
  st.m2 = st.g2;
  st.rho = rho0;
  st.iter = 0;
  return st;
}

bool SolverState::all_finite() const {
  return a.all_finite() && g1.all_finite() && g2.all_finite() && mx.all_finite() &&
         my.all_finite() && m1.all_finite() && m2.all_finite() && std::isfinite(rho);
}

namespace {

Tensor3 forward_x(const Tensor3& a, const FusionProblem& p, const Operators& ops) {
  return mode_n_product(mode_n_product(mode_n_product(a, p.p1, 1), p.p2, 2), ops.s, 3);
}

Tensor3 forward_y(const Tensor3& a, const Operators& ops) { return mode_n_product(a, ops.p3s, 3); }

const Matrix& diff_for(const Operators& ops, int n) { return n == 1 ? ops.d1 : ops.d2; }
const Tensor3& g_of(const SolverState& s, int n) { return n == 1 ? s.g1 : s.g2; }
const Tensor3& m_of(const SolverState& s, int n) { return n == 1 ? s.m1 : s.m2; }

void check_gradient_mode(int n) {
  if (n != 1 && n != 2) throw ArgumentError("G-step mode must be 1 or 2");
}

// value + multiplier / rho
Tensor3 shifted(const Tensor3& value, const Tensor3& multiplier, double rho) {
  Tensor3 out = value;
  out.axpy(1.0 / rho, multiplier);
  return out;
}

}  // namespace

double objective_l1(const Tensor3& a, const SolverState& state, const FusionProblem& problem,
                    const Operators& ops) {
  double total = (shifted(problem.x, state.mx, state.rho) - forward_x(a, problem, ops)).squared_norm();
  total += (shifted(problem.y, state.my, state.rho) - forward_y(a, ops)).squared_norm();
  for (int n = 1; n <= 2; ++n) {
    total += (shifted(g_of(state, n), m_of(state, n), state.rho) - mode_n_product(a, diff_for(ops, n), n))
                 .squared_norm();
  }
  return total;
}

Tensor3 grad_a(const SolverState& state, const FusionProblem& problem, const Operators& ops) {
  const Tensor3& a = state.a;
  if (a.shape() != Shape3{problem.p1.cols(), problem.p2.cols(), ops.s.cols()}) {
    throw DimensionError("spatial tensor shape " + to_string(a.shape()) + " does not match the problem");
  }
  Tensor3 g = mode_n_product(mode_n_product(a, ops.gram1, 1), ops.gram2, 2);
  g += mode_n_product(a, ops.gram3, 3);
  g += mode_n_product(a, ops.dtd1, 1);
  g += mode_n_product(a, ops.dtd2, 2);
  g -= mode_n_product(
      mode_n_product(mode_n_product(shifted(problem.x, state.mx, state.rho), ops.p1t, 1), ops.p2t, 2),
      ops.st, 3);
  g -= mode_n_product(shifted(problem.y, state.my, state.rho), ops.p3s_t, 3);
  g -= mode_n_product(shifted(state.g1, state.m1, state.rho), ops.d1t, 1);
  g -= mode_n_product(shifted(state.g2, state.m2, state.rho), ops.d2t, 2);
  g *= 2.0;
  return g;
}

double step_a(SolverState& state, const FusionProblem& problem, const Operators& ops) {
  if (!(ops.tau > 0.0)) throw PreconditionError("step size tau must be positive");
  const Tensor3 g = grad_a(state, problem, ops);
  state.a.axpy(-1.0 / ops.tau, g);
  return g.norm();
}

double objective_g(const Tensor3& g, const SolverState& state, int n, const Surrogate& psi,
                   const Operators& ops) {
  check_gradient_mode(n);
  Tensor3 r = shifted(g, m_of(state, n), state.rho);
  r -= mode_n_product(state.a, diff_for(ops, n), n);
  return mode_ntpnn(g, 3 - n, psi) + state.rho * r.squared_norm();
}

void step_g(SolverState& state, int n, const Surrogate& psi, const Operators& ops) {
  check_gradient_mode(n);
  Tensor3 target = mode_n_product(state.a, diff_for(ops, n), n);
  target.axpy(-1.0 / state.rho, m_of(state, n));
  Tensor3 g = inverse_permute_p(ntpnn_prox(permute_p(target, 3 - n), state.rho, psi), 3 - n);
  (n == 1 ? state.g1 : state.g2) = std::move(g);
}

Residuals residuals(const SolverState& state, const FusionProblem& problem, const Operators& ops) {
  Residuals r;
  r.x = (problem.x - forward_x(state.a, problem, ops)).norm();
  r.y = (problem.y - forward_y(state.a, ops)).norm();
  r.g1 = (state.g1 - mode_n_product(state.a, ops.d1, 1)).norm();
  r.g2 = (state.g2 - mode_n_product(state.a, ops.d2, 2)).norm();
  return r;
}

Residuals update_multipliers(SolverState& state, const FusionProblem& problem, const Operators& ops,
                             const SolverConfig& config) {
  const Tensor3 rx = problem.x - forward_x(state.a, problem, ops);
  const Tensor3 ry = problem.y - forward_y(state.a, ops);
  const Tensor3 r1 = state.g1 - mode_n_product(state.a, ops.d1, 1);
  const Tensor3 r2 = state.g2 - mode_n_product(state.a, ops.d2, 2);
  state.mx.axpy(state.rho, rx);
  state.my.axpy(state.rho, ry);
  state.m1.axpy(state.rho, r1);
  state.m2.axpy(state.rho, r2);
  ++state.iter;
  state.rho = config.rho0 * std::pow(config.nu, state.iter);
  return {rx.norm(), ry.norm(), r1.norm(), r2.norm()};
}

double stop_threshold(const SolverConfig& config, const FusionProblem& problem) {
  if (config.eps_mode == ToleranceMode::absolute) return config.eps;
  const double scale = problem.x.norm();
  return config.eps * (scale > 0.0 ? scale : 1.0);
}

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
  }
  return m;
}

double growth_ratio(const std::vector<double>& trace) {
  if (trace.empty()) return 0.0;
  const double med = median(trace);
  if (med > 0.0) return trace.back() / med;
  return trace.back() > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

// Checks u_j^H M v_j = -psi'(sigma_j)/2 for every retained Fourier singular value
// of the permuted G. Returns the largest deviation and counts the values checked.
double subgradient_error(const Tensor3& g, const Tensor3& m, int n, const Surrogate& psi,
                         Index& retained) {
  const ComplexTensor3 gf = fft_mode3(permute_p(g, 3 - n));
  const ComplexTensor3 mf = fft_mode3(permute_p(m, 3 - n));
  const std::vector<SliceSvd> svds = kernels::slice_svds(gf, SvdVectors::thin, true);
  double top = 0.0;
  for (const SliceSvd& s : svds) {
    if (s.sigma.size() > 0) top = std::max(top, s.sigma.maxCoeff());
  }
  double worst = 0.0;
  if (top <= 0.0) return worst;
  for (Index k = 0; k < gf.shape()[2]; ++k) {
    const SliceSvd& s = svds[static_cast<std::size_t>(k)];
    const ComplexMatrix mk = mf.slice(k);
    for (Index j = 0; j < s.sigma.size(); ++j) {
      if (s.sigma(j) <= 1e-8 * top) continue;
      const Complex proj = (s.u.col(j).adjoint() * mk * s.v.col(j))(0, 0);
      worst = std::max(worst, std::abs(proj + 0.5 * psi.derivative(s.sigma(j))));
      ++retained;
    }
  }
  return worst;
}

}  // namespace

KktReport kkt_check(const SolverState& state, const FusionProblem& problem, const Operators& ops,
                    const SolverConfig& config, const std::vector<IterationRecord>& history) {
  const Surrogate psi(config.gamma);
  const double eps = stop_threshold(config, problem);
  KktReport k;
  k.residuals = residuals(state, problem, ops);
  k.residual_limit = 10.0 * eps;
  k.grad_norm = grad_a(state, problem, ops).norm();
  k.grad_limit = 10.0 * eps * ops.tau;
  k.subgradient_error = std::max(subgradient_error(state.g1, state.m1, 1, psi, k.retained_values),
                                 subgradient_error(state.g2, state.m2, 2, psi, k.retained_values));
  std::vector<double> mx, my;
  for (const IterationRecord& r : history) {
    mx.push_back(r.mx_norm);
    my.push_back(r.my_norm);
  }
  k.multiplier_ratio = std::max(growth_ratio(mx), growth_ratio(my));
  k.residuals_ok = k.residuals.max() <= k.residual_limit;
  k.grad_ok = k.grad_norm <= k.grad_limit;
  k.subgradient_ok = k.subgradient_error <= k.subgradient_limit;
  k.multipliers_bounded = k.multiplier_ratio < 10.0;
  k.pass = k.residuals_ok && k.grad_ok && k.subgradient_ok;
  return k;
}

SolveResult solve(const FusionProblem& problem, const SolverConfig& config) {
  problem.validate();
  config.validate(problem);
  const Surrogate psi(config.gamma);
  const Matrix s = extract_subspace(problem.x, config.r);
  const Operators ops = prepare_operators(problem, s, config.tau_mode);

  SolveResult out;
  Diagnostics& diag = out.diagnostics;
  diag.tau_mode = config.tau_mode;
  diag.tau = ops.tau;
  diag.tau_literal = ops.tau_literal;
  diag.tau_safe = ops.tau_safe;
  diag.threshold = stop_threshold(config, problem);

  SolverState state = SolverState::zeros(problem, config.r, config.rho0);
  Residuals res = residuals(state, problem, ops);
  using Clock = std::chrono::steady_clock;
  while (res.max() > diag.threshold && state.iter < config.max_iter) {
    const auto start = Clock::now();
    IterationRecord rec;
    rec.iter = state.iter + 1;
    rec.rho = state.rho;
    rec.grad_norm = step_a(state, problem, ops);
    step_g(state, 1, psi, ops);
    step_g(state, 2, psi, ops);
    res = update_multipliers(state, problem, ops, config);
    if (!state.all_finite() || !std::isfinite(res.max())) {
      throw DivergenceError(state.iter, "non-finite iterate at iteration " + std::to_string(state.iter));
    }
    rec.res = res;
    rec.objective = nms_tctv(state.a, psi);
    rec.mx_norm = state.mx.norm();
    rec.my_norm = state.my.norm();
    rec.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    diag.history.push_back(rec);
  }
  diag.iterations = state.iter;
  diag.converged = res.max() <= diag.threshold;
  diag.stop_reason = diag.converged ? "tolerance" : "max_iter";
  diag.kkt = kkt_check(state, problem, ops, config, diag.history);
  out.z_hat = mode_n_product(state.a, s, 3);
  out.s = s;
  out.state = std::move(state);
  return out;
}

}  // namespace cmlptr
