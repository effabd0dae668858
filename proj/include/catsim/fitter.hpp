#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "catsim/experiment_harness.hpp"
#include "catsim/ms_dynamics.hpp"

// Nonlinear least-squares recovery of scan parameters: the Eq.-2 fringe
// model wrapped with linear peak/contrast drift, a baseline offset and a
// linear detuning drift, or a sinusoidal fringe for phase scans. Derivative-
// free simplex descent followed by a damped Gauss-Newton polish;
// uncertainties from the finite-difference normal matrix scaled by the
// residual variance.

namespace catsim {

enum class FitModelKind { Time, Detuning, Phase };

inline std::string fit_model_name(FitModelKind kind) {
  switch (kind) {
    case FitModelKind::Time: return "timescan";
    case FitModelKind::Detuning: return "detuningscan";
    case FitModelKind::Phase: return "phasescan";
  }
  return "unknown";
}

inline FitModelKind parse_fit_model(const std::string& name) {
  if (name == "timescan") return FitModelKind::Time;
  if (name == "detuningscan") return FitModelKind::Detuning;
  if (name == "phasescan") return FitModelKind::Phase;
  throw ConfigError("unknown fit model '" + name + "'");
}

struct FitParamDef {
  const char* name;
  bool positive;  // fitted through a log transform
  bool required;  // must be pinned by the spec (fixed or free)
  double default_value;
};

inline const std::vector<FitParamDef>& fit_model_params(FitModelKind kind) {
  static const std::vector<FitParamDef> time_params = {
      {"omega_sb_khz", true, true, 0.0},
      {"delta_khz", false, true, 0.0},
      {"nbar", true, false, 0.0},
      {"ndot_per_ms", true, false, 0.0},
      {"peak0", false, false, 0.5},
      {"peak1", false, false, 0.0},
      {"contrast0", false, false, 1.0},
      {"contrast1", false, false, 0.0},
      {"baseline", false, false, 0.0},
      {"delta_drift_khz", false, false, 0.0},
  };
  static const std::vector<FitParamDef> detuning_params = {
      {"omega_sb_khz", true, true, 0.0},
      {"tau_us", true, true, 0.0},
      {"nbar", true, false, 0.0},
      {"ndot_per_ms", true, false, 0.0},
      {"peak0", false, false, 0.5},
      {"peak1", false, false, 0.0},
      {"contrast0", false, false, 1.0},
      {"contrast1", false, false, 0.0},
      {"baseline", false, false, 0.0},
      {"delta_drift_khz", false, false, 0.0},
  };
  static const std::vector<FitParamDef> phase_params = {
      {"amplitude", false, false, 0.5},
      {"phi_s_rad", false, false, 0.0},
      {"baseline", false, false, 0.0},
  };
  switch (kind) {
    case FitModelKind::Time: return time_params;
    case FitModelKind::Detuning: return detuning_params;
    case FitModelKind::Phase: return phase_params;
  }
  return time_params;
}

struct FreeParam {
  double init = 0.0;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
};

struct FitSpec {
  FitModelKind kind = FitModelKind::Detuning;
  std::map<std::string, double> fixed;
  std::map<std::string, FreeParam> free;
  int max_polish_iterations = 200;
  int max_simplex_evaluations = 4000;

  void validate() const {
    const auto& defs = fit_model_params(kind);
    auto known = [&](const std::string& name) {
      return std::any_of(defs.begin(), defs.end(),
                         [&](const FitParamDef& d) { return name == d.name; });
    };
    for (const auto& [name, v] : fixed) {
      (void)v;
      if (!known(name)) {
        throw ConfigError("unknown fit parameter '" + name + "' for model " +
                          fit_model_name(kind));
      }
      if (free.count(name)) {
        throw ConfigError("parameter '" + name + "' is both fixed and free");
      }
    }
    for (const auto& [name, v] : free) {
      (void)v;
      if (!known(name)) {
        throw ConfigError("unknown fit parameter '" + name + "' for model " +
                          fit_model_name(kind));
      }
    }
    for (const auto& def : defs) {
      if (def.required && fixed.count(def.name) == 0 &&
          free.count(def.name) == 0) {
        throw ConfigError(std::string("fit parameter '") + def.name +
                          "' must be fixed or free for model " +
                          fit_model_name(kind));
      }
    }
  }
};

struct FitResult {
  FitModelKind kind = FitModelKind::Detuning;
  std::map<std::string, double> values;         // every model parameter
  std::map<std::string, double> uncertainties;  // free parameters, 1 sigma
  double residual_norm = 0.0;
  bool converged = false;
  bool uncertainties_ok = false;
  int iterations = 0;
};

namespace detail {

// Eq.-2 signal with envelope, all parameters in display units.
inline double fit_model_value(FitModelKind kind,
                              const std::map<std::string, double>& p, double x,
                              double u) {
  if (kind == FitModelKind::Phase) {
    const double s = std::sin(x - p.at("phi_s_rad"));
    return p.at("baseline") + p.at("amplitude") * s * s;
  }
  const double omega = p.at("omega_sb_khz") * constants::kTwoPi * 1e3;
  const double drift = p.at("delta_drift_khz") * constants::kTwoPi * 1e3;
  double delta, tau;
  if (kind == FitModelKind::Time) {
    delta = p.at("delta_khz") * constants::kTwoPi * 1e3 + drift * u;
    tau = x;
  } else {
    delta = x + drift * u;
    tau = p.at("tau_us") * 1e-6;
  }
  const double nbar = p.at("nbar");
  const double ndot = p.at("ndot_per_ms") * 1e3;
  // Eq.-2 exponent, with the resonant limit handled explicitly.
  double exponent;
  if (omega <= 0.0 || tau < 0.0 || nbar < 0.0 || ndot < 0.0) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  if (delta == 0.0) {
    const double alpha_abs = 0.5 * omega * tau;
    exponent = -(nbar + 0.5) * 4.0 * alpha_abs * alpha_abs;
    if (ndot > 0.0) exponent = -std::numeric_limits<double>::infinity();
  } else {
    const double a0 = omega / (2.0 * delta);
    const double alpha_abs2 =
        a0 * a0 * (2.0 - 2.0 * std::cos(delta * tau));
    exponent = -0.5 * ndot * tau * 16.0 * a0 * a0 -
               (nbar + 0.5) * 4.0 * alpha_abs2;
  }
  const double decay = std::exp(exponent);
  const double peak = p.at("peak0") + p.at("peak1") * u;
  const double contrast = p.at("contrast0") + p.at("contrast1") * u;
  return p.at("baseline") + peak * (1.0 - contrast * decay);
}

struct FitWorkspace {
  FitModelKind kind;
  std::map<std::string, double> params;  // current full parameter set
  std::vector<std::string> free_names;
  std::vector<bool> log_scale;
  std::vector<double> lower, upper;
  const std::vector<double>* swept;
  const std::vector<double>* estimate;
  double xmin = 0.0, xspan = 1.0;

  double fraction(double x) const {
    return xspan > 0.0 ? (x - xmin) / xspan : 0.0;
  }

  // external -> internal coordinates
  double to_internal(std::size_t k, double v) const {
    if (log_scale[k]) return std::log(std::max(v, 1e-300));
    return v;
  }
  double from_internal(std::size_t k, double y) const {
    double v = log_scale[k] ? std::exp(y) : y;
    return std::clamp(v, lower[k], upper[k]);
  }

  void apply(const Eigen::VectorXd& y) {
    for (std::size_t k = 0; k < free_names.size(); ++k) {
      params[free_names[k]] = from_internal(k, y(static_cast<int>(k)));
    }
  }

  double ssr(const Eigen::VectorXd& y) {
    apply(y);
    double acc = 0.0;
    for (std::size_t i = 0; i < swept->size(); ++i) {
      const double x = (*swept)[i];
      const double m = fit_model_value(kind, params, x, fraction(x));
      if (!std::isfinite(m)) return 1e30;
      const double r = (*estimate)[i] - m;
      acc += r * r;
    }
    return acc;
  }

  Eigen::VectorXd residual_vector(const Eigen::VectorXd& y) {
    apply(y);
    Eigen::VectorXd r(static_cast<int>(swept->size()));
    for (std::size_t i = 0; i < swept->size(); ++i) {
      const double x = (*swept)[i];
      const double m = fit_model_value(kind, params, x, fraction(x));
      r(static_cast<int>(i)) = (*estimate)[i] - (std::isfinite(m) ? m : 1e15);
    }
    return r;
  }
};

// Standard Nelder-Mead on the internal coordinates. Returns the best vertex;
// eval_count accumulates function evaluations.
inline Eigen::VectorXd nelder_mead(FitWorkspace& ws, Eigen::VectorXd y0,
                                   int max_evals, int& eval_count) {
  const int dim = static_cast<int>(y0.size());
  std::vector<Eigen::VectorXd> vertex(dim + 1, y0);
  std::vector<double> cost(dim + 1);
  for (int k = 0; k < dim; ++k) {
    double step = 0.1 * std::max(std::abs(y0(k)), 0.5);
    vertex[k + 1](k) += step;
  }
  for (int k = 0; k <= dim; ++k) {
    cost[k] = ws.ssr(vertex[k]);
    ++eval_count;
  }
  auto order = [&]() {
    for (int a = 0; a <= dim; ++a) {
      for (int b = a + 1; b <= dim; ++b) {
        if (cost[b] < cost[a]) {
          std::swap(cost[a], cost[b]);
          std::swap(vertex[a], vertex[b]);
        }
      }
    }
  };
  order();
  while (eval_count < max_evals) {
    if (cost[dim] - cost[0] < 1e-15 * (1.0 + std::abs(cost[0]))) break;
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
    for (int k = 0; k < dim; ++k) centroid += vertex[k];
    centroid /= dim;
    Eigen::VectorXd refl = centroid + (centroid - vertex[dim]);
    double c_refl = ws.ssr(refl);
    ++eval_count;
    if (c_refl < cost[0]) {
      Eigen::VectorXd expd = centroid + 2.0 * (centroid - vertex[dim]);
      double c_expd = ws.ssr(expd);
      ++eval_count;
      if (c_expd < c_refl) {
        vertex[dim] = expd;
        cost[dim] = c_expd;
      } else {
        vertex[dim] = refl;
        cost[dim] = c_refl;
      }
    } else if (c_refl < cost[dim - 1]) {
      vertex[dim] = refl;
      cost[dim] = c_refl;
    } else {
      Eigen::VectorXd contr = centroid + 0.5 * (vertex[dim] - centroid);
      double c_contr = ws.ssr(contr);
      ++eval_count;
      if (c_contr < cost[dim]) {
        vertex[dim] = contr;
        cost[dim] = c_contr;
      } else {
        for (int k = 1; k <= dim; ++k) {
          vertex[k] = vertex[0] + 0.5 * (vertex[k] - vertex[0]);
          cost[k] = ws.ssr(vertex[k]);
          ++eval_count;
        }
      }
    }
    order();
  }
  return vertex[0];
}

}  // namespace detail

// Residuals estimate - model, in probability units, for explicit parameters.
inline std::vector<double> residuals(const ScanResult& data,
                                     FitModelKind kind,
                                     const std::map<std::string, double>& p) {
  if (data.estimate.size() != data.swept.size()) {
    throw ConfigError("residuals: swept/estimate length mismatch");
  }
  std::map<std::string, double> full;
  for (const auto& def : fit_model_params(kind)) {
    full[def.name] = def.default_value;
  }
  for (const auto& [name, v] : p) {
    if (full.count(name) == 0) {
      throw ConfigError("residuals: unknown parameter '" + name + "'");
    }
    full[name] = v;
  }
  const auto [mn, mx] =
      std::minmax_element(data.swept.begin(), data.swept.end());
  const double span = *mx - *mn;
  std::vector<double> out(data.swept.size());
  for (std::size_t i = 0; i < data.swept.size(); ++i) {
    const double u = span > 0.0 ? (data.swept[i] - *mn) / span : 0.0;
    out[i] = data.estimate[i] -
             detail::fit_model_value(kind, full, data.swept[i], u);
  }
  return out;
}

inline FitResult fit(const ScanResult& data, const FitSpec& spec) {
  spec.validate();
  const auto& defs = fit_model_params(spec.kind);
  if (data.swept.size() != data.estimate.size() || data.swept.size() < 2) {
    throw ConfigError("fit data needs matching swept/estimate arrays");
  }
  const int n_free = static_cast<int>(spec.free.size());
  if (static_cast<int>(data.swept.size()) < 2 * std::max(n_free, 1)) {
    throw ConfigError("fit needs at least 2x more points than free parameters");
  }

  detail::FitWorkspace ws;
  ws.kind = spec.kind;
  ws.swept = &data.swept;
  ws.estimate = &data.estimate;
  const auto [mn, mx] =
      std::minmax_element(data.swept.begin(), data.swept.end());
  ws.xmin = *mn;
  ws.xspan = *mx - *mn;
  for (const auto& def : defs) ws.params[def.name] = def.default_value;
  for (const auto& [name, v] : spec.fixed) ws.params[name] = v;

  FitResult result;
  result.kind = spec.kind;

  if (n_free == 0) {
    Eigen::VectorXd y(0);
    result.residual_norm = std::sqrt(ws.ssr(y));
    result.values = ws.params;
    result.converged = true;
    result.uncertainties_ok = true;
    return result;
  }

  for (const auto& [name, fp] : spec.free) {
    const auto def = std::find_if(defs.begin(), defs.end(),
                                  [&](const auto& d) { return name == d.name; });
    ws.free_names.push_back(name);
    ws.log_scale.push_back(def->positive);
    ws.lower.push_back(def->positive ? std::max(fp.lower, 0.0) : fp.lower);
    ws.upper.push_back(fp.upper);
    ws.params[name] = fp.init;
  }

  Eigen::VectorXd y(n_free);
  for (int k = 0; k < n_free; ++k) {
    y(k) = ws.to_internal(k, spec.free.at(ws.free_names[k]).init);
  }

  int evals = 0;
  y = detail::nelder_mead(ws, y, spec.max_simplex_evaluations, evals);

  // Damped Gauss-Newton polish with finite-difference Jacobian.
  double lambda = 1e-3;
  double ssr = ws.ssr(y);
  bool polished = false;
  int iter = 0;
  Eigen::MatrixXd jacobian(static_cast<int>(data.swept.size()), n_free);
  Eigen::VectorXd r = ws.residual_vector(y);
  for (; iter < spec.max_polish_iterations; ++iter) {
    for (int k = 0; k < n_free; ++k) {
      const double h = 1e-6 * std::max(std::abs(y(k)), 1e-3);
      Eigen::VectorXd yp = y, ym = y;
      yp(k) += h;
      ym(k) -= h;
      jacobian.col(k) = (ws.residual_vector(yp) - ws.residual_vector(ym)) /
                        (2.0 * h);
      evals += 2;
    }
    const Eigen::MatrixXd normal = jacobian.transpose() * jacobian;
    const Eigen::VectorXd grad = jacobian.transpose() * r;
    bool stepped = false;
    for (int attempt = 0; attempt < 12; ++attempt) {
      Eigen::MatrixXd damped = normal;
      damped.diagonal() += lambda * normal.diagonal().cwiseMax(1e-12);
      const Eigen::VectorXd step = damped.ldlt().solve(-grad);
      const Eigen::VectorXd y_new = y + step;
      const double ssr_new = ws.ssr(y_new);
      ++evals;
      if (ssr_new <= ssr) {
        const double rel_drop = (ssr - ssr_new) / std::max(ssr, 1e-300);
        y = y_new;
        ssr = ssr_new;
        r = ws.residual_vector(y);
        lambda = std::max(lambda * 0.3, 1e-12);
        stepped = true;
        if (rel_drop < 1e-12 || step.norm() < 1e-13) polished = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!stepped || polished) {
      polished = polished || !stepped;
      break;
    }
  }

  ws.apply(y);
  result.values = ws.params;
  result.residual_norm = std::sqrt(ssr);
  result.converged = polished;
  result.iterations = evals;

  // 1-sigma uncertainties from the normal matrix at the optimum.
  const int n_pts = static_cast<int>(data.swept.size());
  if (n_pts > n_free) {
    for (int k = 0; k < n_free; ++k) {
      const double h = 1e-6 * std::max(std::abs(y(k)), 1e-3);
      Eigen::VectorXd yp = y, ym = y;
      yp(k) += h;
      ym(k) -= h;
      jacobian.col(k) = (ws.residual_vector(yp) - ws.residual_vector(ym)) /
                        (2.0 * h);
    }
    ws.apply(y);
    const Eigen::MatrixXd normal = jacobian.transpose() * jacobian;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(normal);
    if (lu.isInvertible()) {
      const double variance = ssr / (n_pts - n_free);
      const Eigen::MatrixXd cov = variance * lu.inverse();
      result.uncertainties_ok = true;
      for (int k = 0; k < n_free; ++k) {
        double sigma_y = std::sqrt(std::max(cov(k, k), 0.0));
        const double value = result.values[ws.free_names[k]];
        // chain rule through the log transform
        const double sigma =
            ws.log_scale[k] ? sigma_y * std::abs(value) : sigma_y;
        result.uncertainties[ws.free_names[k]] = sigma;
      }
    }
  }
  return result;
}

}  // namespace catsim
