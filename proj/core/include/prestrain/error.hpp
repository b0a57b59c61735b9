#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace prestrain {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by inverse_laplacian when the input still carries a mean.
class NonZeroMean : public Error {
 public:
  NonZeroMean(double mean, double tolerance);
  double mean() const { return mean_; }

 private:
  double mean_;
};

class NotSPD : public Error {
 public:
  explicit NotSPD(double smallest_eigenvalue);
  double smallest_eigenvalue() const { return eigenvalue_; }

 private:
  double eigenvalue_;
};

/// Jet composition of |x|^q at x = 0 past the order where it is smooth.
class NonSmooth : public Error {
 public:
  using Error::Error;
};

class GridMismatch : public Error {
 public:
  GridMismatch();
};

class NotElliptic : public Error {
 public:
  NotElliptic(double eigenvalue, int kx, int ky, int kz);
};

/// Solver failures carry the simulation time at which they happened.
class SolverError : public Error {
 public:
  explicit SolverError(const std::string& what,
                       double time = std::numeric_limits<double>::quiet_NaN());

  double time() const { return time_; }
  bool has_time() const { return !std::isnan(time_); }
  void set_time(double t);
  const char* what() const noexcept override { return message_.c_str(); }

 private:
  std::string base_;
  double time_;
  std::string message_;
};

/// A node left the domain of the density (det <= 0 where W is +infinity).
class OutOfDomain : public SolverError {
 public:
  explicit OutOfDomain(double determinant,
                       double time = std::numeric_limits<double>::quiet_NaN());
  double determinant() const { return determinant_; }

 private:
  double determinant_;
};

class UnstableStep : public SolverError {
 public:
  using SolverError::SolverError;
};

class NoContraction : public SolverError {
 public:
  using SolverError::SolverError;
};

class NewtonDiverged : public SolverError {
 public:
  using SolverError::SolverError;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

/// Carries every violation found, not just the first.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

}  // namespace prestrain
