#pragma once

#include <cmath>
#include <vector>

#include "qcayley/integrators.hpp"

namespace qcayley {

/// A(t) = -i (sigma_z + sin(t) sigma_x).
template <typename Real>
OperatorSampler<Real> rabi_sampler() {
  return [](Real t) {
    const Real s = std::sin(t);
    DenseMatrix<Real> a(2, 2);
    a << Complex<Real>(0, -1), Complex<Real>(0, -s), Complex<Real>(0, -s), Complex<Real>(0, 1);
    return ComplexMatrix<Real>(a);
  };
}

/// Least-squares slope of log(error) against log(dt).
template <typename Real>
Real fitted_order(const std::vector<Real>& dts, const std::vector<Real>& errors) {
  if (dts.size() != errors.size() || dts.size() < 2) {
    throw ParameterError("order fit needs at least two (dt, error) pairs");
  }
  Real mx = 0, my = 0;
  const auto n = Real(dts.size());
  for (std::size_t i = 0; i < dts.size(); ++i) {
    if (!(errors[i] > 0)) throw NumericError("order fit needs positive errors");
    mx += std::log(dts[i]) / n;
    my += std::log(errors[i]) / n;
  }
  Real sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < dts.size(); ++i) {
    const Real dx = std::log(dts[i]) - mx;
    sxy += dx * (std::log(errors[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

struct OrderRow {
  Scheme scheme;
  Index n_steps;
  double dt;
  double error;
};

struct OrderStudy {
  std::vector<OrderRow> rows;
  std::vector<std::pair<Scheme, double>> slopes;
};

/// Global errors of each scheme on the Rabi problem over [0, t_final] from
/// (1, 0), against a CFC4 reference with `reference_steps` steps computed in
/// extended precision so its own roundoff stays below the coarse errors.
inline OrderStudy rabi_order_study(const std::vector<Scheme>& schemes,
                                   const std::vector<Index>& step_counts, double t_final = 1,
                                   Index reference_steps = 100000) {
  using Ext = long double;
  if (step_counts.size() < 2) throw ParameterError("order study needs at least two step counts");
  Vector<Ext> start = Vector<Ext>::Zero(2);
  start(0) = 1;
  const Vector<Ext> ref_ext =
      propagate<Ext>(Scheme::Cfc4, rabi_sampler<Ext>(), 0, Ext(t_final) / Ext(reference_steps),
                     reference_steps, start, false)
          .final_state();
  const Vector<double> reference = ref_ext.cast<Complex<double>>();

  OrderStudy out;
  Vector<double> v0 = Vector<double>::Zero(2);
  v0(0) = 1;
  for (Scheme scheme : schemes) {
    std::vector<double> dts, errors;
    for (Index n : step_counts) {
      const double dt = t_final / double(n);
      const auto psi = propagate<double>(scheme, rabi_sampler<double>(), 0, dt, n, v0, false);
      const double err = (psi.final_state() - reference).norm();
      out.rows.push_back({scheme, n, dt, err});
      dts.push_back(dt);
      errors.push_back(err);
    }
    out.slopes.emplace_back(scheme, fitted_order(dts, errors));
  }
  return out;
}

}  // namespace qcayley
