#pragma once

#include <Eigen/Dense>
#include <functional>

namespace annealed {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

using ScalarField = std::function<double(const Vector&)>;
using VectorField = std::function<Vector(const Vector&)>;

struct GradientEstimate {
  Vector value;
  Vector error;
};

struct MatrixEstimate {
  Matrix value;
  Matrix error;
};

struct DerivativeEstimate {
  double value = 0.0;
  double error = 0.0;
};

// Central differences at steps h and h/2 combined by Richardson extrapolation;
// the error estimate is |extrapolated - fine|.
DerivativeEstimate fd_derivative(const std::function<double(double)>& f, double x, double h);
DerivativeEstimate fd_second_derivative(const std::function<double(double)>& f, double x, double h);
GradientEstimate fd_gradient(const ScalarField& f, const Vector& x, double h);
MatrixEstimate fd_hessian(const ScalarField& f, const Vector& x, double h);
// Rows are output components, columns are input directions.
MatrixEstimate fd_jacobian(const VectorField& f, const Vector& x, double h);

}  // namespace annealed
