#include "rapido/lp.hpp"

#include <algorithm>
#include <cmath>

namespace rapido::lp {

namespace {

constexpr double kEps = 1e-9;

/// Tableau simplex for: maximize c.x s.t. A x <= b, x >= 0.
///
/// Layout: rows 0..m-1 are constraints, row m the objective, row m+1 the
/// phase-one objective. Column n is the artificial variable used when some
/// b_i < 0, column n+1 the right-hand side. basis_[i] / nonbasis_[j] hold
/// variable indices; slack i is variable n+i and the artificial is -1.
class Tableau {
 public:
  Tableau(const std::vector<std::vector<double>>& a, const std::vector<double>& b, const std::vector<double>& c)
      : m_(static_cast<int>(b.size())),
        n_(static_cast<int>(c.size())),
        basis_(m_),
        nonbasis_(n_ + 1),
        d_(m_ + 2, std::vector<double>(n_ + 2, 0.0)) {
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < n_; ++j) d_[i][j] = a[i][j];
      basis_[i] = n_ + i;
      d_[i][n_] = -1.0;
      d_[i][n_ + 1] = b[i];
    }
    for (int j = 0; j < n_; ++j) {
      nonbasis_[j] = j;
      d_[m_][j] = -c[j];
    }
    nonbasis_[n_] = -1;
    d_[m_ + 1][n_] = 1.0;
  }

  Status solve(std::vector<double>& x, double& value) {
    int r = 0;
    for (int i = 1; i < m_; ++i) {
      if (d_[i][n_ + 1] < d_[r][n_ + 1]) r = i;
    }
    if (m_ > 0 && d_[r][n_ + 1] < -kEps) {
      pivot(r, n_);
      if (!run(2) || d_[m_ + 1][n_ + 1] < -kEps) return Status::Infeasible;
      for (int i = 0; i < m_; ++i) {
        if (basis_[i] != -1) continue;
        int s = 0;
        for (int j = 1; j <= n_; ++j) {
          if (std::make_pair(d_[i][j], nonbasis_[j]) < std::make_pair(d_[i][s], nonbasis_[s])) s = j;
        }
        pivot(i, s);
      }
    }
    const bool bounded = run(1);
    x.assign(n_, 0.0);
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] >= 0 && basis_[i] < n_) x[basis_[i]] = d_[i][n_ + 1];
    }
    value = d_[m_][n_ + 1];
    return bounded ? Status::Optimal : Status::Unbounded;
  }

 private:
  void pivot(int r, int s) {
    const double inv = 1.0 / d_[r][s];
    auto& pivot_row = d_[r];
    for (int i = 0; i < m_ + 2; ++i) {
      if (i == r || std::fabs(d_[i][s]) <= kEps) continue;
      auto& row = d_[i];
      const double factor = row[s] * inv;
      for (int j = 0; j < n_ + 2; ++j) row[j] -= pivot_row[j] * factor;
      row[s] = pivot_row[s] * factor;
    }
    for (int j = 0; j < n_ + 2; ++j) {
      if (j != s) pivot_row[j] *= inv;
    }
    for (int i = 0; i < m_ + 2; ++i) {
      if (i != r) d_[i][s] *= -inv;
    }
    pivot_row[s] = inv;
    std::swap(basis_[r], nonbasis_[s]);
  }

  bool run(int phase) {
    const int obj = m_ + phase - 1;
    // Dantzig pricing, falling back to Bland's rule if it starts cycling.
    const int bland_after = 50 * (m_ + n_ + 2);
    for (int iter = 0;; ++iter) {
      const bool bland = iter > bland_after;
      int s = -1;
      for (int j = 0; j <= n_; ++j) {
        if (nonbasis_[j] == -phase) continue;
        if (bland) {
          if (d_[obj][j] < -kEps && (s == -1 || nonbasis_[j] < nonbasis_[s])) s = j;
        } else if (s == -1 ||
                   std::make_pair(d_[obj][j], nonbasis_[j]) < std::make_pair(d_[obj][s], nonbasis_[s])) {
          s = j;
        }
      }
      if (s == -1 || d_[obj][s] >= -kEps) return true;
      int r = -1;
      for (int i = 0; i < m_; ++i) {
        if (d_[i][s] <= kEps) continue;
        if (r == -1) {
          r = i;
          continue;
        }
        const double lhs = d_[i][n_ + 1] / d_[i][s];
        const double rhs = d_[r][n_ + 1] / d_[r][s];
        if (lhs < rhs - kEps || (lhs <= rhs + kEps && basis_[i] < basis_[r])) r = i;
      }
      if (r == -1) return false;
      pivot(r, s);
    }
  }

  int m_;
  int n_;
  std::vector<int> basis_;
  std::vector<int> nonbasis_;
  std::vector<std::vector<double>> d_;
};

}  // namespace

int Problem::add_variable(double lower, double upper, double cost) {
  lower_.push_back(lower);
  upper_.push_back(upper);
  cost_.push_back(cost);
  return static_cast<int>(lower_.size()) - 1;
}

void Problem::set_bounds(int var, double lower, double upper) {
  lower_.at(var) = lower;
  upper_.at(var) = upper;
}

void Problem::add_row(std::vector<std::pair<int, double>> terms, Sense sense, double rhs) {
  rows_.push_back({std::move(terms), sense, rhs});
}

Result Problem::minimize() const {
  const int n = variable_count();
  Result result;
  for (int j = 0; j < n; ++j) {
    if (lower_[j] > upper_[j] + kEps) return result;
  }

  // Rewrite every variable over nonnegative columns: x = lower + x' when the
  // lower bound is finite, x = upper - x' when only the upper one is, and
  // x = x+ - x- when it is free. All constraints become normalised <= rows.
  struct Mapping {
    double constant = 0.0;
    std::vector<std::pair<int, double>> columns;
  };
  std::vector<Mapping> map(n);
  int cols = 0;
  for (int j = 0; j < n; ++j) {
    if (!std::isinf(lower_[j])) {
      map[j] = {lower_[j], {{cols++, 1.0}}};
    } else if (!std::isinf(upper_[j])) {
      map[j] = {upper_[j], {{cols++, -1.0}}};
    } else {
      map[j].columns = {{cols, 1.0}, {cols + 1, -1.0}};
      cols += 2;
    }
  }

  std::vector<std::vector<double>> a;
  std::vector<double> b;
  auto push = [&](std::vector<double> coef, double rhs) {
    double scale = 0.0;
    for (const double v : coef) scale = std::max(scale, std::fabs(v));
    if (scale < 1e-300) {
      if (rhs < -kEps) scale = -1.0;  // 0 <= negative: infeasible row, keep as is
      else return;
    }
    if (scale > 0.0) {
      for (double& v : coef) v /= scale;
      rhs /= scale;
    }
    a.push_back(std::move(coef));
    b.push_back(rhs);
  };
  for (const auto& row : rows_) {
    std::vector<double> coef(cols, 0.0);
    double rhs = row.rhs;
    for (const auto& [var, v] : row.terms) {
      for (const auto& [col, sign] : map[var].columns) coef[col] += v * sign;
      rhs -= v * map[var].constant;
    }
    if (row.sense == Sense::LessEqual || row.sense == Sense::Equal) push(coef, rhs);
    if (row.sense == Sense::GreaterEqual || row.sense == Sense::Equal) {
      for (double& v : coef) v = -v;
      push(std::move(coef), -rhs);
    }
  }
  for (int j = 0; j < n; ++j) {
    if (std::isinf(lower_[j]) || std::isinf(upper_[j])) continue;
    std::vector<double> coef(cols, 0.0);
    coef[map[j].columns.front().first] = 1.0;
    push(std::move(coef), upper_[j] - lower_[j]);
  }
  // A row reduced to 0 <= rhs < 0 marks the problem infeasible.
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool empty = std::all_of(a[i].begin(), a[i].end(), [](double v) { return v == 0.0; });
    if (empty && b[i] < -kEps) return result;
  }

  std::vector<double> c(cols, 0.0);
  double offset = 0.0;
  for (int j = 0; j < n; ++j) {
    for (const auto& [col, sign] : map[j].columns) c[col] -= cost_[j] * sign;
    offset += cost_[j] * map[j].constant;
  }
  Tableau tableau(a, b, c);
  std::vector<double> x;
  double value = 0.0;
  result.status = tableau.solve(x, value);
  if (result.status != Status::Optimal) return result;
  result.values.assign(n, 0.0);
  for (int j = 0; j < n; ++j) {
    result.values[j] = map[j].constant;
    for (const auto& [col, sign] : map[j].columns) result.values[j] += sign * x[col];
  }
  result.objective = -value + offset;
  return result;
}

}  // namespace rapido::lp
