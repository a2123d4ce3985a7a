#include "annealed/finite_difference.hpp"

#include <cmath>

#include "annealed/errors.hpp"

namespace annealed {
namespace {

double checked(double v) {
  if (!std::isfinite(v)) throw DomainError("finite difference: non-finite function value");
  return v;
}

Vector checked(Vector v) {
  if (!v.allFinite()) throw DomainError("finite difference: non-finite function value");
  return v;
}

void check_inputs(const Vector& x, double h) {
  if (!x.allFinite()) throw DomainError("finite difference: non-finite point");
  if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("finite difference: step must be positive");
}

}  // namespace

DerivativeEstimate fd_derivative(const std::function<double(double)>& f, double x, double h) {
  check_inputs(Vector::Constant(1, x), h);
  auto central = [&](double s) { return (checked(f(x + s)) - checked(f(x - s))) / (2.0 * s); };
  double coarse = central(h);
  double fine = central(0.5 * h);
  double rich = (4.0 * fine - coarse) / 3.0;
  return {rich, std::abs(rich - fine)};
}

DerivativeEstimate fd_second_derivative(const std::function<double(double)>& f, double x, double h) {
  check_inputs(Vector::Constant(1, x), h);
  double f0 = checked(f(x));
  auto central = [&](double s) { return (checked(f(x + s)) - 2.0 * f0 + checked(f(x - s))) / (s * s); };
  double coarse = central(h);
  double fine = central(0.5 * h);
  double rich = (4.0 * fine - coarse) / 3.0;
  return {rich, std::abs(rich - fine)};
}

GradientEstimate fd_gradient(const ScalarField& f, const Vector& x, double h) {
  check_inputs(x, h);
  const Eigen::Index d = x.size();
  GradientEstimate out{Vector(d), Vector(d)};
  for (Eigen::Index i = 0; i < d; ++i) {
    auto line = [&](double s) {
      Vector y = x;
      y(i) = s;
      return f(y);
    };
    auto e = fd_derivative(line, x(i), h);
    out.value(i) = e.value;
    out.error(i) = e.error;
  }
  return out;
}

MatrixEstimate fd_hessian(const ScalarField& f, const Vector& x, double h) {
  check_inputs(x, h);
  const Eigen::Index d = x.size();
  MatrixEstimate out{Matrix(d, d), Matrix(d, d)};
  const double f0 = checked(f(x));
  auto at = [&](Eigen::Index i, double si, Eigen::Index j, double sj) {
    Vector y = x;
    y(i) += si;
    y(j) += sj;
    return checked(f(y));
  };
  for (Eigen::Index i = 0; i < d; ++i) {
    auto diag = [&](double s) { return (at(i, s, i, 0.0) - 2.0 * f0 + at(i, -s, i, 0.0)) / (s * s); };
    double c = diag(h), fi = diag(0.5 * h);
    double r = (4.0 * fi - c) / 3.0;
    out.value(i, i) = r;
    out.error(i, i) = std::abs(r - fi);
    for (Eigen::Index j = i + 1; j < d; ++j) {
      auto mixed = [&](double s) {
        return (at(i, s, j, s) - at(i, s, j, -s) - at(i, -s, j, s) + at(i, -s, j, -s)) / (4.0 * s * s);
      };
      double mc = mixed(h), mf = mixed(0.5 * h);
      double mr = (4.0 * mf - mc) / 3.0;
      out.value(i, j) = out.value(j, i) = mr;
      out.error(i, j) = out.error(j, i) = std::abs(mr - mf);
    }
  }
  return out;
}

MatrixEstimate fd_jacobian(const VectorField& f, const Vector& x, double h) {
  check_inputs(x, h);
  const Eigen::Index d = x.size();
  Vector f0 = checked(f(x));
  const Eigen::Index m = f0.size();
  MatrixEstimate out{Matrix(m, d), Matrix(m, d)};
  for (Eigen::Index j = 0; j < d; ++j) {
    auto central = [&](double s) {
      Vector yp = x, ym = x;
      yp(j) += s;
      ym(j) -= s;
      return Vector((checked(f(yp)) - checked(f(ym))) / (2.0 * s));
    };
    Vector c = central(h), fi = central(0.5 * h);
    Vector r = (4.0 * fi - c) / 3.0;
    out.value.col(j) = r;
    out.error.col(j) = (r - fi).cwiseAbs();
  }
  return out;
}

}  // namespace annealed
