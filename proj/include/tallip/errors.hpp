#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace tallip {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A slack went nonpositive: the point is not strictly interior.
class InfeasibleInterior : public SolverError {
 public:
  InfeasibleInterior(Index row, double slack)
      : SolverError("nonpositive slack " + std::to_string(slack) +
                    " at constraint " + std::to_string(row)),
        row_(row),
        slack_(slack) {}
  Index row() const noexcept { return row_; }
  double slack() const noexcept { return slack_; }

 private:
  Index row_;
  double slack_;
};

class NonConvergence : public SolverError {
 public:
  using SolverError::SolverError;
};

class RankDeficient : public SolverError {
 public:
  using SolverError::SolverError;
};

}  // namespace tallip
