#include <algorithm>
#include <cmath>
#include <cstdio>

#include "gdpkit/error.hpp"
#include "gdpkit/milp.hpp"

namespace gdpkit {

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kUnbounded: return "unbounded";
    case SolveStatus::kLimit: return "limit";
  }
  return "?";
}

namespace {

constexpr double kCostTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr double kFeasTol = 1e-9;
constexpr int kDegenerateLimit = 50;
constexpr std::size_t kRefreshEvery = 100;

enum class Phase { kOne, kTwo };

/// Dense tableau bounded-variable primal simplex. Columns are the structural
/// variables, one slack per row (a.x + s = b) and one artificial per row
/// whose initial residual falls outside its slack range.
class DenseSimplex {
 public:
  DenseSimplex(const MilpModel& model, std::span<const double> lower,
               std::span<const double> upper, std::size_t max_iterations)
      : m_(model.rows.size()), n_(model.variables.size()) {
    // Minimize internally.
    const double sign = model.sense == Sense::kMaximize ? -1.0 : 1.0;
    cost_.assign(n_ + m_, 0.0);
    for (const auto& [var, coeff] : model.objective.terms()) {
      cost_[var.value] = sign * coeff;
    }
    lower_.assign(lower.begin(), lower.end());
    upper_.assign(upper.begin(), upper.end());
    rhs_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      const auto& row = model.rows[i];
      rhs_[i] = row.rhs;
      switch (row.relation) {
        case Relation::kLessEqual:
          lower_.push_back(0.0);
          upper_.push_back(kInf);
          break;
        case Relation::kGreaterEqual:
          lower_.push_back(-kInf);
          upper_.push_back(0.0);
          break;
        case Relation::kEqual:
          lower_.push_back(0.0);
          upper_.push_back(0.0);
          break;
      }
    }
    structural_.assign(m_, std::vector<double>(n_, 0.0));
    for (std::size_t i = 0; i < m_; ++i) {
      for (const auto& [var, coeff] : model.rows[i].expr.terms()) {
        structural_[i][var.value] = coeff;
      }
    }
    max_iterations_ = max_iterations != 0
                          ? max_iterations
                          : 50 * (m_ + n_ + m_) + 1000;
  }

  LpSolution solve() {
    LpSolution out;
    for (std::size_t j = 0; j < n_; ++j) {
      if (lower_[j] > upper_[j]) {
        out.status = SolveStatus::kInfeasible;
        return out;
      }
    }
    setup();
    SolveStatus status = SolveStatus::kOptimal;
    if (num_artificial_ > 0) {
      status = run(Phase::kOne);
      if (status == SolveStatus::kLimit) return finish(out, status);
      double infeasibility = 0.0;
      for (std::size_t j = n_ + m_; j < cols_; ++j) infeasibility += value_[j];
      if (infeasibility > 1e-7) return finish(out, SolveStatus::kInfeasible);
      for (std::size_t j = n_ + m_; j < cols_; ++j) upper_[j] = 0.0;
    }
    status = run(Phase::kTwo);
    return finish(out, status);
  }

 private:
  void setup() {
    // Structural start at a finite bound (free variables at zero).
    value_.assign(n_ + m_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      if (std::isfinite(lower_[j])) {
        value_[j] = lower_[j];
      } else if (std::isfinite(upper_[j])) {
        value_[j] = upper_[j];
      }
    }
    std::vector<double> residual(m_);
    std::vector<double> art_sign(m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      double activity = 0.0;
      for (std::size_t j = 0; j < n_; ++j) activity += structural_[i][j] * value_[j];
      residual[i] = rhs_[i] - activity;
      const std::size_t s = n_ + i;
      if (residual[i] < lower_[s] - kFeasTol || residual[i] > upper_[s] + kFeasTol) {
        art_sign[i] = residual[i] > 0 ? 1.0 : -1.0;
        ++num_artificial_;
      }
    }
    cols_ = n_ + m_ + num_artificial_;
    lower_.resize(cols_, 0.0);
    upper_.resize(cols_, kInf);
    value_.resize(cols_, 0.0);
    cost_.resize(cols_, 0.0);
    basic_.assign(cols_, -1);
    basis_.assign(m_, 0);
    tableau_.assign(m_, std::vector<double>(cols_, 0.0));

    std::size_t next_art = n_ + m_;
    for (std::size_t i = 0; i < m_; ++i) {
      auto& row = tableau_[i];
      std::copy(structural_[i].begin(), structural_[i].end(), row.begin());
      row[n_ + i] = 1.0;
      if (art_sign[i] == 0.0) {
        basis_[i] = n_ + i;
        value_[n_ + i] = residual[i];
      } else {
        const std::size_t a = next_art++;
        row[a] = art_sign[i];
        // Basis column is sign * e_i, so B^-1 scales the row by sign.
        for (double& entry : row) entry *= art_sign[i];
        basis_[i] = a;
        value_[a] = std::abs(residual[i]);
        value_[n_ + i] = 0.0;
      }
      basic_[basis_[i]] = static_cast<int>(i);
    }
    structural_.clear();
  }

  double phase_cost(Phase phase, std::size_t j) const {
    if (phase == Phase::kOne) return j >= n_ + m_ ? 1.0 : 0.0;
    return cost_[j];
  }

  void compute_reduced_costs(Phase phase) {
    reduced_.assign(cols_, 0.0);
    for (std::size_t j = 0; j < cols_; ++j) reduced_[j] = phase_cost(phase, j);
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = phase_cost(phase, basis_[i]);
      if (cb == 0.0) continue;
      const auto& row = tableau_[i];
      for (std::size_t j = 0; j < cols_; ++j) reduced_[j] -= cb * row[j];
    }
  }

  // beta = B^-1 b - sum over nonbasic j of T_j x_j; the slack block of the
  // tableau holds B^-1.
  void refresh_basic_values() {
    for (std::size_t i = 0; i < m_; ++i) {
      const auto& row = tableau_[i];
      double beta = 0.0;
      for (std::size_t k = 0; k < m_; ++k) beta += row[n_ + k] * rhs_[k];
      for (std::size_t j = 0; j < cols_; ++j) {
        if (basic_[j] < 0 && value_[j] != 0.0) beta -= row[j] * value_[j];
      }
      value_[basis_[i]] = beta;
    }
  }

  SolveStatus run(Phase phase) {
    compute_reduced_costs(phase);
    int degenerate = 0;
    bool bland = false;
    std::size_t since_refresh = 0;
    while (true) {
      if (iterations_ >= max_iterations_) return SolveStatus::kLimit;
      if (++since_refresh >= kRefreshEvery) {
        refresh_basic_values();
        compute_reduced_costs(phase);
        since_refresh = 0;
      }

      // Entering column.
      std::size_t q = cols_;
      double best = 0.0;
      double dir = 0.0;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (basic_[j] >= 0) continue;
        const double d = reduced_[j];
        double candidate_dir = 0.0;
        if (d < -kCostTol && value_[j] < upper_[j]) candidate_dir = 1.0;
        if (d > kCostTol && value_[j] > lower_[j]) candidate_dir = -1.0;
        if (candidate_dir == 0.0) continue;
        if (bland) {
          q = j;
          dir = candidate_dir;
          break;
        }
        if (std::abs(d) > best) {
          best = std::abs(d);
          q = j;
          dir = candidate_dir;
        }
      }
      if (q == cols_) {
        refresh_basic_values();
        return SolveStatus::kOptimal;
      }

      // Ratio test.
      double theta = upper_[q] - lower_[q];
      if (!std::isfinite(theta)) theta = kInf;
      std::size_t r = m_;
      double r_alpha = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        const double alpha = tableau_[i][q] * dir;
        if (std::abs(alpha) <= kPivotTol) continue;
        const std::size_t b = basis_[i];
        double limit = kInf;
        if (alpha > 0.0 && std::isfinite(lower_[b])) {
          limit = (value_[b] - lower_[b]) / alpha;
        } else if (alpha < 0.0 && std::isfinite(upper_[b])) {
          limit = (upper_[b] - value_[b]) / -alpha;
        }
        if (!std::isfinite(limit)) continue;
        limit = std::max(limit, 0.0);
        bool take = false;
        if (limit < theta - 1e-12) {
          take = true;
        } else if (limit <= theta + 1e-12 && r < m_) {
          take = bland ? b < basis_[r] : std::abs(alpha) > std::abs(r_alpha);
        }
        if (take) {
          theta = limit;
          r = i;
          r_alpha = alpha;
        }
      }
      if (!std::isfinite(theta)) return SolveStatus::kUnbounded;

      ++iterations_;
      if (theta <= 1e-12) {
        if (++degenerate >= kDegenerateLimit) bland = true;
      } else {
        degenerate = 0;
        bland = false;
      }

      for (std::size_t i = 0; i < m_; ++i) {
        const double alpha = tableau_[i][q] * dir;
        if (alpha != 0.0) value_[basis_[i]] -= alpha * theta;
      }
      value_[q] += dir * theta;

      if (r == m_) {
        // Bound flip.
        value_[q] = dir > 0 ? upper_[q] : lower_[q];
        continue;
      }
      const std::size_t leaving = basis_[r];
      value_[leaving] = r_alpha > 0.0 ? lower_[leaving] : upper_[leaving];
      pivot(r, q);
    }
  }

  void pivot(std::size_t r, std::size_t q) {
    auto& pivot_row = tableau_[r];
    const double inv = 1.0 / pivot_row[q];
    for (double& entry : pivot_row) entry *= inv;
    pivot_row[q] = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      auto& row = tableau_[i];
      const double factor = row[q];
      if (factor == 0.0) continue;
      for (std::size_t j = 0; j < cols_; ++j) row[j] -= factor * pivot_row[j];
      row[q] = 0.0;
    }
    const double dq = reduced_[q];
    if (dq != 0.0) {
      for (std::size_t j = 0; j < cols_; ++j) reduced_[j] -= dq * pivot_row[j];
      reduced_[q] = 0.0;
    }
    basic_[basis_[r]] = -1;
    basis_[r] = q;
    basic_[q] = static_cast<int>(r);
  }

  LpSolution& finish(LpSolution& out, SolveStatus status) {
    out.status = status;
    out.iterations = iterations_;
    if (status != SolveStatus::kOptimal) return out;
    out.point.assign(value_.begin(), value_.begin() + n_);
    for (std::size_t j = 0; j < n_; ++j) {
      double& x = out.point[j];
      if (std::abs(x - lower_[j]) <= kFeasTol) x = lower_[j];
      if (std::abs(x - upper_[j]) <= kFeasTol) x = upper_[j];
    }
    double objective = 0.0;
    for (std::size_t j = 0; j < n_; ++j) objective += cost_[j] * out.point[j];
    out.objective = objective;
    out.row_duals.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) out.row_duals[i] = -reduced_[n_ + i];
    return out;
  }

  std::size_t m_;
  std::size_t n_;
  std::size_t cols_ = 0;
  std::size_t num_artificial_ = 0;
  std::size_t iterations_ = 0;
  std::size_t max_iterations_;
  std::vector<std::vector<double>> structural_;
  std::vector<std::vector<double>> tableau_;
  std::vector<double> rhs_;
  std::vector<double> cost_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<double> value_;
  std::vector<double> reduced_;
  std::vector<std::size_t> basis_;
  std::vector<int> basic_;
};

}  // namespace

LpSolution solve_lp(const MilpModel& model, std::span<const double> lower,
                    std::span<const double> upper, const LpOptions& options) {
  if (!model.nonlinear_rows.empty()) {
    throw Error(Errc::kNonlinear,
                "model has nonlinear rows; the embedded solver is linear only");
  }
  if (lower.size() != model.variables.size() ||
      upper.size() != model.variables.size()) {
    throw Error(Errc::kInvalidArgument, "bound override size mismatch");
  }
  DenseSimplex simplex(model, lower, upper, options.max_iterations);
  LpSolution out = simplex.solve();
  if (out.status == SolveStatus::kOptimal) {
    const double sign = model.sense == Sense::kMaximize ? -1.0 : 1.0;
    out.objective = sign * out.objective + model.objective.constant();
    for (double& dual : out.row_duals) dual *= sign;
  }
  return out;
}

LpSolution solve_lp(const MilpModel& model, const LpOptions& options) {
  std::vector<double> lower;
  std::vector<double> upper;
  for (const auto& var : model.variables) {
    lower.push_back(var.lower);
    upper.push_back(var.upper);
  }
  return solve_lp(model, lower, upper, options);
}

}  // namespace gdpkit
