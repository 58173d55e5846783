#pragma once

#include <limits>
#include <utility>
#include <vector>

namespace rapido::lp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Sense { LessEqual, GreaterEqual, Equal };
enum class Status { Optimal, Infeasible, Unbounded };

struct Result {
  Status status = Status::Infeasible;
  double objective = 0.0;
  std::vector<double> values;
};

/// Small dense linear program: minimize c.x subject to rows and box bounds.
/// Solved with a two-phase tableau simplex; intended for the few-dozen-row
/// programs the split solver builds, not for large sparse models.
class Problem {
 public:
  int add_variable(double lower, double upper, double cost);
  void set_bounds(int var, double lower, double upper);
  void add_row(std::vector<std::pair<int, double>> terms, Sense sense, double rhs);

  int variable_count() const { return static_cast<int>(lower_.size()); }
  Result minimize() const;

 private:
  struct Row {
    std::vector<std::pair<int, double>> terms;
    Sense sense;
    double rhs;
  };
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<double> cost_;
  std::vector<Row> rows_;
};

}  // namespace rapido::lp
