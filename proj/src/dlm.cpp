#include "segdep/dlm.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

namespace segdep {

DesignRow design_row(const TimeSeries& data, int s, int t) {
  if (s < 0 || t <= s || t > data.n())
    throw InvalidArgument("design_row: need 0 <= s < t <= n (s=" + std::to_string(s) +
                          ", t=" + std::to_string(t) + ")");
  return DesignRow::from_offset(data.x_at(t) - data.x_at(s + 1));
}

void symmetrize_psd(Mat3& D, double tol) {
  D = 0.5 * (D + D.transpose()).eval();
  // Cheap exit: a symmetric 3x3 with positive leading minors is PD.
  const double m1 = D(0, 0);
  const double m2 = D(0, 0) * D(1, 1) - D(0, 1) * D(0, 1);
  if (m1 > 0.0 && m2 > 0.0 && D.determinant() > 0.0) return;

  Eigen::SelfAdjointEigenSolver<Mat3> eig(D);
  Vec3 lambda = eig.eigenvalues();
  const double scale = std::max(1.0, D.cwiseAbs().maxCoeff());
  if (lambda.minCoeff() >= 0.0) return;
  for (int i = 0; i < 3; ++i) {
    if (lambda[i] < -tol * scale)
      throw NumericalError("covariance lost positive semi-definiteness (eigenvalue " +
                           std::to_string(lambda[i]) + ")");
    if (lambda[i] < 0.0) lambda[i] = 0.0;
  }
  const Mat3& V = eig.eigenvectors();
  D = V * lambda.asDiagonal() * V.transpose();
  D = 0.5 * (D + D.transpose()).eval();
}

NIGParams posterior_update(const NIGParams& zeta, const DesignRow& row, double y) {
  const Vec3 Dh = zeta.D * row.h;
  const double Q = row.h.dot(Dh) + 1.0;
  const double e = y - row.h.dot(zeta.mu);
  NIGParams out;
  out.nu = zeta.nu + 1.0;
  out.gamma = zeta.gamma + e * e / Q;
  out.mu = zeta.mu + Dh * (e / Q);
  out.D = zeta.D - Dh * Dh.transpose() / Q;
  symmetrize_psd(out.D);
  return out;
}

double log_predictive_density(const NIGParams& zeta, const DesignRow& row, double y) {
  if (!zeta.proper()) return 0.0;
  const double Q = row.h.dot(zeta.D * row.h) + 1.0;
  const double e = y - row.h.dot(zeta.mu);
  const double nu = zeta.nu;
  const double gq = zeta.gamma * Q;  // nu times the squared scale
  return std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
         0.5 * std::log(std::numbers::pi * gq) - 0.5 * (nu + 1.0) * std::log1p(e * e / gq);
}

double predictive_density(const NIGParams& zeta, const DesignRow& row, double y) {
  return std::exp(log_predictive_density(zeta, row, y));
}

}  // namespace segdep
