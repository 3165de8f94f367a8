#include "tensorcit/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace tct {

namespace {

// Component basis of the symmetric tensor space: E0 = [[1,0],[0,0]],
// E1 = [[0,1],[1,0]], E2 = [[0,0],[0,1]].
inline Vec2 component_apply(int c, const Vec2& v) {
  switch (c) {
    case 0: return {v.x(), 0.0};
    case 1: return {v.y(), v.x()};
    default: return {0.0, v.y()};
  }
}

// Frobenius weight of a component against itself (off-diagonal counts twice).
constexpr double kComponentWeight[3] = {1.0, 2.0, 1.0};

void run_per_load(int count, int threads, const std::function<void(int)>& body) {
  threads = std::clamp(threads, 1, count);
  if (threads <= 1) {
    for (int l = 0; l < count; ++l) body(l);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  for (int w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (int l = next.fetch_add(1); l < count; l = next.fetch_add(1)) body(l);
    });
  for (auto& th : pool) th.join();
}

}  // namespace

StoppingMetric stopping_metric(const NewtonState& prev, const NewtonState& next) {
  StoppingMetric m;
  auto add = [&m](double num, double den) {
    if (den == 0.0) {
      m.degenerate = true;
      return;
    }
    m.value = std::max(m.value, num / den);
  };
  add(tensor_l2_distance(next.tensor, prev.tensor), std::sqrt(tensor_l2_norm_sq(next.tensor)));
  for (std::size_t l = 0; l < next.states.size(); ++l) {
    ScalarField du(next.states[l].space, next.states[l].coeffs - prev.states[l].coeffs);
    add(scalar_l2_norm(du), scalar_l2_norm(next.states[l]));
    ScalarField dp(next.adjoints[l].space, next.adjoints[l].coeffs - prev.adjoints[l].coeffs);
    add(scalar_l2_norm(dp), scalar_l2_norm(next.adjoints[l]));
  }
  return m;
}

NewtonAssembler::NewtonAssembler(std::shared_ptr<const FeSpace> space, TensorLayout layout,
                                 int load_count)
    : space_(std::move(space)), layout_(layout), load_count_(load_count) {
  if (load_count_ < 1) throw config_error("newton: need at least one load");
  tensor_nodes_per_tri_ = layout_ == TensorLayout::dg1 ? 3 : 1;
  tensor_node_count_ = space_->mesh().triangle_count() * tensor_nodes_per_tri_;
  residual_ = Eigen::VectorXd::Zero(total_size());
}

// Emits every Jacobian entry in a fixed deterministic order and accumulates
// the first-order residual. Row families: forward equations, adjoint
// equations, then the optimality condition tested against the tensor basis.
template <typename Emit>
void NewtonAssembler::walk_entries(const NewtonState& state,
                                   const std::vector<CurrentDensity>& data, double gamma,
                                   Emit&& emit) {
  const FeSpace& sp = *space_;
  const TriangleRule& rule = sp.rule();
  const int nloc = sp.local_dof_count();
  const int nq = rule.size();
  const int n0 = sp.interior_count();
  const int L = load_count_;
  const int tn = tensor_nodes_per_tri_;

  std::vector<QuadVectorField> grad_u(L), grad_p(L);
  for (int l = 0; l < L; ++l) {
    grad_u[l] = gradient_at_quadrature(state.states[l]);
    grad_p[l] = gradient_at_quadrature(state.adjoints[l]);
  }

  residual_.setZero();

  Vec2 g[6], Ag[6], A2g[6];
  int iu[6];
  double psi[3];

  for (int t = 0; t < sp.mesh().triangle_count(); ++t) {
    const auto& qps = sp.quad_points(t);
    for (int i = 0; i < nloc; ++i) iu[i] = sp.interior_index(sp.global_dof(t, i));

    for (int l = 0; l < L; ++l) {
      for (int q = 0; q < nq; ++q) {
        const auto& bary = rule.points[q];
        const double w = qps[q].weight;
        sp.basis_gradients_at_quad(t, q, g);
        if (tn == 1)
          psi[0] = 1.0;
        else
          for (int k = 0; k < 3; ++k) psi[k] = bary[k];

        const SymTensor2 a = state.tensor.eval(t, bary);
        const SymTensor2 a2 = a.squared();
        for (int j = 0; j < nloc; ++j) {
          Ag[j] = a.apply(g[j]);
          A2g[j] = a2.apply(g[j]);
        }

        const Vec2 gu = grad_u[l].at(t, q);
        const Vec2 gp = grad_p[l].at(t, q);
        const Vec2 res = a.apply(gu) - data[l].at(t, q);
        const Vec2 s = gp + res;  // grad p + A grad u - h

        Vec2 e_gu[3], e_s[3];
        for (int c = 0; c < 3; ++c) {
          e_gu[c] = component_apply(c, gu);
          e_s[c] = component_apply(c, s);
        }

        // Forward and adjoint equation rows (interior test functions).
        for (int i = 0; i < nloc; ++i) {
          if (iu[i] < 0) continue;
          const int row_u = l * n0 + iu[i];
          const int row_p = (L + l) * n0 + iu[i];
          residual_[row_u] += w * a.apply(gu).dot(g[i]);
          residual_[row_p] += w * a.apply(s).dot(g[i]);
          for (int j = 0; j < nloc; ++j) {
            if (iu[j] < 0) continue;
            emit(row_u, l * n0 + iu[j], w * Ag[j].dot(g[i]));
            emit(row_p, l * n0 + iu[j], w * A2g[j].dot(g[i]));
            emit(row_p, (L + l) * n0 + iu[j], w * Ag[j].dot(g[i]));
          }
          for (int k = 0; k < tn; ++k)
            for (int c = 0; c < 3; ++c) {
              const int col = tensor_dof(t, k, c);
              emit(row_u, col, w * psi[k] * e_gu[c].dot(g[i]));
              emit(row_p, col, w * psi[k] * (e_s[c] + a.apply(e_gu[c])).dot(g[i]));
            }
        }

        // Optimality rows for this load's terms.
        for (int k = 0; k < tn; ++k) {
          for (int c = 0; c < 3; ++c) {
            const int row = tensor_dof(t, k, c);
            const double wk = w * kComponentWeight[c] * psi[k];
            residual_[row] += wk * (sym_outer(gu, res) + sym_outer(gu, gp)).component(c);
            for (int j = 0; j < nloc; ++j) {
              if (iu[j] < 0) continue;
              const SymTensor2 mu =
                  sym_outer(g[j], res) + sym_outer(gu, Ag[j]) + sym_outer(g[j], gp);
              emit(row, l * n0 + iu[j], wk * mu.component(c));
              emit(row, (L + l) * n0 + iu[j], wk * sym_outer(gu, g[j]).component(c));
            }
            for (int k2 = 0; k2 < tn; ++k2)
              for (int c2 = 0; c2 < 3; ++c2)
                emit(row, tensor_dof(t, k2, c2),
                     wk * psi[k2] * sym_outer(gu, e_gu[c2]).component(c));
          }
        }
      }
    }

    // Penalty block and its residual, once per triangle.
    for (int q = 0; q < nq; ++q) {
      const auto& bary = rule.points[q];
      const double w = qps[q].weight;
      if (tn == 1)
        psi[0] = 1.0;
      else
        for (int k = 0; k < 3; ++k) psi[k] = bary[k];
      const SymTensor2 a = state.tensor.eval(t, bary);
      for (int k = 0; k < tn; ++k)
        for (int c = 0; c < 3; ++c) {
          const int row = tensor_dof(t, k, c);
          const double wk = w * kComponentWeight[c] * psi[k];
          residual_[row] += wk * gamma * a.component(c);
          for (int k2 = 0; k2 < tn; ++k2)
            emit(row, tensor_dof(t, k2, c), wk * gamma * psi[k2]);
        }
    }
  }
}

void NewtonAssembler::assemble(const NewtonState& state, const std::vector<LoadCase>& loads,
                               const std::vector<CurrentDensity>& data, double gamma) {
  if (static_cast<int>(state.states.size()) != load_count_ ||
      static_cast<int>(state.adjoints.size()) != load_count_ ||
      static_cast<int>(data.size()) != load_count_ ||
      static_cast<int>(loads.size()) != load_count_)
    throw layout_error("newton: load count mismatch");
  if (state.tensor.layout != layout_)
    throw layout_error("newton: tensor layout mismatch");

  if (!pattern_ready_) {
    std::vector<Eigen::Triplet<double>> triplets;
    walk_entries(state, data, gamma, [&](int r, int c, double v) {
      triplets.emplace_back(r, c, v);
    });
    matrix_.resize(total_size(), total_size());
    matrix_.setFromTriplets(triplets.begin(), triplets.end());
    matrix_.makeCompressed();

    // Map the (fixed) emission order to compressed-storage slots.
    slots_.clear();
    slots_.reserve(triplets.size());
    const int* outer = matrix_.outerIndexPtr();
    const int* inner = matrix_.innerIndexPtr();
    for (const auto& tr : triplets) {
      const int* begin = inner + outer[tr.col()];
      const int* end = inner + outer[tr.col() + 1];
      const int* pos = std::lower_bound(begin, end, tr.row());
      slots_.push_back(static_cast<int>(pos - inner));
    }
    pattern_ready_ = true;
  } else {
    double* vals = matrix_.valuePtr();
    std::fill(vals, vals + matrix_.nonZeros(), 0.0);
    std::size_t idx = 0;
    walk_entries(state, data, gamma, [&](int, int, double v) { vals[slots_[idx++]] += v; });
  }

  // Source terms of the forward residual.
  const FeSpace& sp = *space_;
  for (int l = 0; l < load_count_; ++l) {
    if (!loads[l].source) continue;
    const Eigen::VectorXd f = assemble_source_load(sp, loads[l].source);
    for (int k = 0; k < sp.interior_count(); ++k)
      residual_[l * sp.interior_count() + k] -= f[sp.interior_to_dof(k)];
  }
}

NewtonIncrement NewtonAssembler::solve() {
  const FeSpace& sp = *space_;
  const int n0 = sp.interior_count();
  NewtonIncrement inc;
  inc.tensor = SymTensorField(sp.mesh_ptr(), layout_);
  inc.states.assign(load_count_, Eigen::VectorXd::Zero(sp.dof_count()));
  inc.adjoints.assign(load_count_, Eigen::VectorXd::Zero(sp.dof_count()));

  const double scale = matrix_.nonZeros() > 0 ? matrix_.coeffs().abs().maxCoeff() : 0.0;
  if (residual_.lpNorm<Eigen::Infinity>() <= 1e-12 * std::max(1.0, scale))
    return inc;  // zero residual: the zero increment solves the system exactly

  if (!analyzed_) {
    lu_.analyzePattern(matrix_);
    analyzed_ = true;
  }
  lu_.factorize(matrix_);
  if (lu_.info() != Eigen::Success)
    throw solver_error("newton system is singular (gamma too small for the current "
                       "linearization?); consider a gradient step");
  const Eigen::VectorXd delta = lu_.solve(residual_);
  const double rel_residual = (matrix_ * delta - residual_).norm() / residual_.norm();
  if (!(rel_residual <= 1e-8))
    throw solver_error("newton solve residual " + std::to_string(rel_residual) +
                       " exceeds 1e-8 (system nearly singular)");

  for (int l = 0; l < load_count_; ++l)
    for (int k = 0; k < n0; ++k) {
      inc.states[l][sp.interior_to_dof(k)] = delta[l * n0 + k];
      inc.adjoints[l][sp.interior_to_dof(k)] = delta[(load_count_ + l) * n0 + k];
    }
  for (int t = 0; t < sp.mesh().triangle_count(); ++t)
    for (int k = 0; k < tensor_nodes_per_tri_; ++k)
      inc.tensor.at(t, k) = {delta[tensor_dof(t, k, 0)], delta[tensor_dof(t, k, 1)],
                             delta[tensor_dof(t, k, 2)]};
  return inc;
}

NewtonIncrement newton_step(NewtonAssembler& assembler, const NewtonState& state,
                            const std::vector<LoadCase>& loads,
                            const std::vector<CurrentDensity>& data, double gamma) {
  assembler.assemble(state, loads, data, gamma);
  return assembler.solve();
}

NewtonState initialize_state(const SymTensorField& tensor, const std::vector<LoadCase>& loads,
                             const std::vector<CurrentDensity>& data,
                             std::shared_ptr<const FeSpace> space, LinearSolver solver,
                             int threads) {
  const int L = static_cast<int>(loads.size());
  NewtonState state{tensor, std::vector<ScalarField>(), std::vector<ScalarField>()};
  state.states.assign(L, ScalarField(space));
  state.adjoints.assign(L, ScalarField(space));

  const DirichletOperator op(space, assemble_stiffness(*space, tensor), solver);
  run_per_load(L, threads, [&](int l) {
    const Eigen::VectorXd f = loads[l].source ? assemble_source_load(*space, loads[l].source)
                                              : Eigen::VectorXd::Zero(space->dof_count());
    ScalarField bc = set_dirichlet(ScalarField(space), loads[l].dirichlet);
    state.states[l] = op.solve(f, bc);
    state.adjoints[l] = solve_adjoint_with(op, tensor, state.states[l], data[l], space);
  });
  return state;
}

NewtonState projected_newton(NewtonAssembler& assembler, NewtonState state,
                             const std::vector<LoadCase>& loads,
                             const std::vector<CurrentDensity>& data, const Bounds& bounds,
                             double gamma, const NewtonConfig& config, InnerReport* report) {
  config.validate();
  bounds.validate();

  InnerReport local;
  local.eigen_range = eigenvalue_range(state.tensor);

  for (int it = 1; it <= config.max_inner_iterations; ++it) {
    const NewtonIncrement inc = newton_step(assembler, state, loads, data, gamma);

    NewtonState next;
    next.tensor = state.tensor;
    for (std::size_t i = 0; i < next.tensor.values.size(); ++i)
      next.tensor.values[i] = state.tensor.values[i] - inc.tensor.values[i];
    next.tensor = project_field(next.tensor, bounds);
    next.states = state.states;
    next.adjoints = state.adjoints;
    for (std::size_t l = 0; l < next.states.size(); ++l) {
      next.states[l].coeffs -= inc.states[l];
      next.adjoints[l].coeffs -= inc.adjoints[l];
    }

    const StoppingMetric metric = stopping_metric(state, next);
    state = std::move(next);

    const EigenRange r = eigenvalue_range(state.tensor);
    local.eigen_range.min = std::min(local.eigen_range.min, r.min);
    local.eigen_range.max = std::max(local.eigen_range.max, r.max);
    local.iterations = it;
    local.last_metric = metric.value;
    local.metric_degenerate = metric.degenerate;
    if (metric.value <= config.tolerance) break;
  }
  if (report) *report = local;
  return state;
}

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::discrepancy_met: return "discrepancy_met";
    case StopReason::max_outer: return "max_outer";
    case StopReason::stagnation: return "stagnation";
  }
  return "unknown";
}

ReconstructionResult path_following(const SymTensorField& initial_guess,
                                    const std::vector<LoadCase>& loads,
                                    const std::vector<CurrentDensity>& data,
                                    std::shared_ptr<const FeSpace> space, const Bounds& bounds,
                                    const PathConfig& path_config,
                                    const NewtonConfig& newton_config,
                                    const TensorFunction& reference, LinearSolver solver,
                                    int threads,
                                    const std::function<void(const IterationRecord&)>& on_record) {
  path_config.validate();
  newton_config.validate();
  bounds.validate();
  if (!path_config.noise_norm_sq.empty() && path_config.noise_norm_sq.size() != loads.size())
    throw config_error("path: noise norm count must match the load count");

  const SymTensorField start = project_field(initial_guess, bounds);
  NewtonAssembler assembler(space, start.layout, static_cast<int>(loads.size()));
  NewtonState state = initialize_state(start, loads, data, space, solver, threads);

  const double noise_bound = path_config.noise_total();

  ReconstructionResult result;
  result.stop_reason = StopReason::max_outer;

  SymTensorField prev_tensor = state.tensor;
  double prev_change = std::numeric_limits<double>::infinity();

  for (int n = 0; n < path_config.max_outer_iterations; ++n) {
    const double gamma = path_config.gamma0 * std::pow(path_config.rho, n);
    if (newton_config.resolve_after_projection && n > 0)
      state = initialize_state(state.tensor, loads, data, space, solver, threads);

    InnerReport report;
    state = projected_newton(assembler, std::move(state), loads, data, bounds, gamma,
                             newton_config, &report);

    IterationRecord rec;
    rec.outer = n;
    rec.gamma = gamma;
    rec.inner_iterations = report.iterations;
    rec.objective = eval_objective(state.tensor, state.states, data, gamma);
    rec.residual = data_residual(state.tensor, state.states, data);
    rec.relative_change = report.last_metric;
    rec.eigen_range = report.eigen_range;
    if (reference) rec.error = relative_error(state.tensor, reference);
    result.history.push_back(rec);
    if (on_record) on_record(rec);

    if (rec.residual <= noise_bound) {
      result.stop_reason = StopReason::discrepancy_met;
      break;
    }

    const double norm = std::sqrt(tensor_l2_norm_sq(state.tensor));
    const double change = tensor_l2_distance(state.tensor, prev_tensor) / std::max(norm, 1e-300);
    if (n >= 1 && change < path_config.stagnation_tol && prev_change < path_config.stagnation_tol) {
      result.stop_reason = StopReason::stagnation;
      break;
    }
    prev_change = change;
    prev_tensor = state.tensor;
  }

  result.tensor = std::move(state.tensor);
  result.states = std::move(state.states);
  result.adjoints = std::move(state.adjoints);
  return result;
}

GradientDescentResult projected_gradient_descent(const SymTensorField& initial_guess,
                                                 const std::vector<LoadCase>& loads,
                                                 const std::vector<CurrentDensity>& data,
                                                 std::shared_ptr<const FeSpace> space,
                                                 const Bounds& bounds, double gamma,
                                                 const GradientDescentConfig& config,
                                                 LinearSolver solver) {
  bounds.validate();
  const int L = static_cast<int>(loads.size());

  auto solve_states = [&](const SymTensorField& a) {
    const DirichletOperator op(space, assemble_stiffness(*space, a), solver);
    std::vector<ScalarField> states;
    states.reserve(L);
    for (int l = 0; l < L; ++l) {
      const Eigen::VectorXd f = loads[l].source ? assemble_source_load(*space, loads[l].source)
                                                : Eigen::VectorXd::Zero(space->dof_count());
      states.push_back(op.solve(f, set_dirichlet(ScalarField(space), loads[l].dirichlet)));
    }
    return states;
  };

  GradientDescentResult result;
  result.state.tensor = project_field(initial_guess, bounds);
  result.state.states = solve_states(result.state.tensor);
  result.eigen_range = eigenvalue_range(result.state.tensor);

  double objective = eval_objective(result.state.tensor, result.state.states, data, gamma).total;
  result.objectives.push_back(objective);
  double step = config.initial_step;

  for (int it = 1; it <= config.max_iterations; ++it) {
    const DirichletOperator op(space, assemble_stiffness(*space, result.state.tensor), solver);
    result.state.adjoints.clear();
    for (int l = 0; l < L; ++l)
      result.state.adjoints.push_back(
          solve_adjoint_with(op, result.state.tensor, result.state.states[l], data[l], space));
    const SymTensorField grad = eval_gradient(result.state.tensor, result.state.states,
                                              result.state.adjoints, data, gamma);

    bool accepted = false;
    double s = step;
    SymTensorField trial;
    std::vector<ScalarField> trial_states;
    double trial_objective = 0.0;
    double trial_dist_sq = 0.0;

    for (int bt = 0; bt <= config.max_backtracks; ++bt) {
      trial = result.state.tensor;
      for (std::size_t i = 0; i < trial.values.size(); ++i)
        trial.values[i] = result.state.tensor.values[i] - s * grad.values[i];
      trial = project_field(trial, bounds);
      const double dist = tensor_l2_distance(trial, result.state.tensor);
      trial_dist_sq = dist * dist;
      if (trial_dist_sq == 0.0) {
        // Stationary: the projected gradient step leaves the iterate unchanged.
        result.iterations = it - 1;
        return result;
      }
      bool solvable = true;
      try {
        trial_states = solve_states(trial);
      } catch (const Error&) {
        solvable = false;
      }
      if (solvable) {
        trial_objective = eval_objective(trial, trial_states, data, gamma).total;
        if (trial_objective <= objective - config.armijo_slope / s * trial_dist_sq) {
          accepted = true;
          break;
        }
      }
      s *= 0.5;
    }
    if (!accepted)
      throw solver_error("gradient descent: line search failed after " +
                         std::to_string(config.max_backtracks) + " backtracks");

    const double rel_change =
        std::sqrt(trial_dist_sq) / std::max(std::sqrt(tensor_l2_norm_sq(trial)), 1e-300);
    result.state.tensor = std::move(trial);
    result.state.states = std::move(trial_states);
    objective = trial_objective;
    result.objectives.push_back(objective);
    result.iterations = it;

    const EigenRange r = eigenvalue_range(result.state.tensor);
    result.eigen_range.min = std::min(result.eigen_range.min, r.min);
    result.eigen_range.max = std::max(result.eigen_range.max, r.max);

    step = std::min(s * 2.0, 1e12);
    if (rel_change <= config.tolerance) break;
  }
  return result;
}

}  // namespace tct
