#pragma once

#include <Eigen/Dense>

namespace vcde {

// Covariates and response after per-column standardization, plus the
// metadata needed to map results back to the original scale. Immutable
// after construction; shared read-only across chains.
struct Dataset {
  Eigen::MatrixXd x;  // n x p, standardized
  Eigen::VectorXd y;  // n, standardized
  Eigen::VectorXd col_means;
  Eigen::VectorXd col_sds;  // divisor actually used (1 for constant columns)
  double y_mean = 0.0;
  double y_sd = 1.0;

  Eigen::Index n() const { return x.rows(); }
  Eigen::Index p() const { return x.cols(); }
};

// Center and scale each covariate column and the response. Columns with zero
// variance are left centered only (divisor 1). Throws std::invalid_argument
// on non-finite input or n < 2.
Dataset standardize(const Eigen::MatrixXd& raw_x, const Eigen::VectorXd& raw_y);

// Inverse of standardize for checking round trips.
Eigen::MatrixXd destandardize_x(const Dataset& data);
Eigen::VectorXd destandardize_y(const Dataset& data);

// Throws std::invalid_argument when a Dataset invariant is broken.
void validate(const Dataset& data);

}  // namespace vcde
