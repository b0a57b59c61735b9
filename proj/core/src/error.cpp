#include "prestrain/error.hpp"

#include <sstream>

namespace prestrain {

namespace {

std::string join(const std::vector<std::string>& items) {
  std::ostringstream out;
  out << "invalid configuration:";
  for (const auto& item : items) out << "\n  - " << item;
  return out.str();
}

std::string number(double value) {
  std::ostringstream out;
  out.precision(17);
  out << value;
  return out.str();
}

}  // namespace

NonZeroMean::NonZeroMean(double mean, double tolerance)
    : Error("inverse_laplacian: field mean " + number(mean) + " exceeds tolerance " +
            number(tolerance) + "; project out the mean first"),
      mean_(mean) {}

NotSPD::NotSPD(double smallest_eigenvalue)
    : Error("matrix is not symmetric positive definite (smallest eigenvalue " +
            number(smallest_eigenvalue) + ")"),
      eigenvalue_(smallest_eigenvalue) {}

GridMismatch::GridMismatch() : Error("fields live on different grids") {}

NotElliptic::NotElliptic(double eigenvalue, int kx, int ky, int kz)
    : Error("acoustic matrix not positive definite at k = (" + std::to_string(kx) + ", " +
            std::to_string(ky) + ", " + std::to_string(kz) + "), eigenvalue " +
            number(eigenvalue)) {}

SolverError::SolverError(const std::string& what, double time)
    : Error(what), base_(what), time_(std::numeric_limits<double>::quiet_NaN()),
      message_(what) {
  if (!std::isnan(time)) set_time(time);
}

void SolverError::set_time(double t) {
  time_ = t;
  message_ = base_ + " (t = " + number(t) + ")";
}

OutOfDomain::OutOfDomain(double determinant, double time)
    : SolverError("state left the density domain: det = " + number(determinant), time),
      determinant_(determinant) {}

ValidationError::ValidationError(std::vector<std::string> violations)
    : Error(join(violations)), violations_(std::move(violations)) {}

}  // namespace prestrain
