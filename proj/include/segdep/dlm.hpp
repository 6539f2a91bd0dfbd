#ifndef SEGDEP_DLM_HPP
#define SEGDEP_DLM_HPP

#include "segdep/segment_model.hpp"

namespace segdep {

// Row (1, d, d^2) of the quadratic design matrix, d = x_t - x_{s+1}.
struct DesignRow {
  Vec3 h;

  static DesignRow from_offset(double delta) { return {Vec3(1.0, delta, delta * delta)}; }
  double offset() const { return h[1]; }
};

// Design row for observation t in the segment that starts after changepoint s.
// Requires 0 <= s < t <= n.
DesignRow design_row(const TimeSeries& data, int s, int t);

// Symmetrizes D in place and clamps eigenvalues in (-tol, 0) to zero.
// Throws NumericalError if an eigenvalue is below -tol.
void symmetrize_psd(Mat3& D, double tol = 1e-10);

// Conjugate update of zeta with one observation y at design row h.
NIGParams posterior_update(const NIGParams& zeta, const DesignRow& h, double y);

// Student-t predictive density of y: nu degrees of freedom, location h.mu,
// squared scale gamma * Q / nu with Q = h D h' + 1. Returns 1 (log 0) for the
// improper prior nu = 0 or gamma = 0.
double log_predictive_density(const NIGParams& zeta, const DesignRow& h, double y);
double predictive_density(const NIGParams& zeta, const DesignRow& h, double y);

}  // namespace segdep

#endif  // SEGDEP_DLM_HPP
