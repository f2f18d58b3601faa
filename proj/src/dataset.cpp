#include "vcde/dataset.hpp"

#include <cmath>
#include <stdexcept>

namespace vcde {

Dataset standardize(const Eigen::MatrixXd& raw_x, const Eigen::VectorXd& raw_y) {
  const Eigen::Index n = raw_x.rows();
  const Eigen::Index p = raw_x.cols();
  if (n < 2) throw std::invalid_argument("standardize: need at least 2 rows");
  if (p < 1) throw std::invalid_argument("standardize: need at least 1 covariate");
  if (raw_y.size() != n) throw std::invalid_argument("standardize: x/y row mismatch");
  if (!raw_x.allFinite() || !raw_y.allFinite())
    throw std::invalid_argument("standardize: non-finite entries");

  Dataset out;
  out.x = raw_x;
  out.y = raw_y;
  out.col_means.resize(p);
  out.col_sds.resize(p);

  for (Eigen::Index k = 0; k < p; ++k) {
    const double mean = raw_x.col(k).mean();
    const double ss = (raw_x.col(k).array() - mean).square().sum();
    const double sd = std::sqrt(ss / double(n - 1));
    out.col_means[k] = mean;
    out.col_sds[k] = sd > 0.0 ? sd : 1.0;
    out.x.col(k) = (raw_x.col(k).array() - mean) / out.col_sds[k];
  }

  out.y_mean = raw_y.mean();
  const double yss = (raw_y.array() - out.y_mean).square().sum();
  const double ysd = std::sqrt(yss / double(n - 1));
  out.y_sd = ysd > 0.0 ? ysd : 1.0;
  out.y = (raw_y.array() - out.y_mean) / out.y_sd;
  return out;
}

Eigen::MatrixXd destandardize_x(const Dataset& data) {
  Eigen::MatrixXd raw = data.x;
  for (Eigen::Index k = 0; k < data.p(); ++k)
    raw.col(k) = data.x.col(k).array() * data.col_sds[k] + data.col_means[k];
  return raw;
}

Eigen::VectorXd destandardize_y(const Dataset& data) {
  return data.y.array() * data.y_sd + data.y_mean;
}

void validate(const Dataset& data) {
  const Eigen::Index n = data.n();
  const Eigen::Index p = data.p();
  if (n < 2 || p < 1) throw std::invalid_argument("Dataset: n >= 2 and p >= 1 required");
  if (data.y.size() != n) throw std::invalid_argument("Dataset: x/y row mismatch");
  if (!data.x.allFinite() || !data.y.allFinite())
    throw std::invalid_argument("Dataset: non-finite entries");
  if (data.col_means.size() != p || data.col_sds.size() != p)
    throw std::invalid_argument("Dataset: metadata size mismatch");
  for (Eigen::Index k = 0; k < p; ++k) {
    const double mean = data.x.col(k).mean();
    const double sd =
        std::sqrt((data.x.col(k).array() - mean).square().sum() / double(n - 1));
    if (std::abs(mean) > 1e-9)
      throw std::invalid_argument("Dataset: standardized column mean off");
    if (sd > 0.0 && std::abs(sd - 1.0) > 1e-9)
      throw std::invalid_argument("Dataset: standardized column sd off");
  }
}

}  // namespace vcde
