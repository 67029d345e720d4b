#include "obroute/congestion.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace obroute {

void validate_demand(const DemandMatrix& d, int n) {
  if (d.rows() != n || d.cols() != n) {
    throw InputError("demand matrix is " + std::to_string(d.rows()) + "x" +
                     std::to_string(d.cols()) + ", graph has " + std::to_string(n) +
                     " vertices");
  }
  if (!d.allFinite()) throw InputError("demand matrix has non-finite entries");
  if ((d.array() < 0.0).any()) throw InputError("negative demand");
  if ((d.diagonal().array() != 0.0).any()) throw InputError("demand matrix has nonzero diagonal");
}

CongestionReport make_congestion_report(Eigen::VectorXd per_link) {
  CongestionReport r;
  r.per_link = std::move(per_link);
  if (r.per_link.size() > 0) {
    Eigen::Index at = 0;
    r.max = r.per_link.maxCoeff(&at);
    r.argmax = static_cast<int>(at);
  }
  return r;
}

void attach_opt(CongestionReport& report, double opt) {
  report.opt = opt;
  if (opt > 0) {
    report.ratio = report.max / opt;
  } else if (report.max == 0.0) {
    report.ratio = 0.0;
  } else {
    throw std::domain_error("zero optimum with nonzero congestion");
  }
}

}  // namespace obroute
