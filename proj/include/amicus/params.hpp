#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "amicus/errors.hpp"

namespace amicus {

// Issue-specific ideal point of one justice (length D, or 1 for the
// unidimensional model).
using IdealPoint = std::vector<double>;

enum class ModelKind { Unidimensional, Issues, Amici, RandomUtility };

inline const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::Unidimensional: return "unidimensional";
    case ModelKind::Issues: return "issues";
    case ModelKind::Amici: return "amici";
    case ModelKind::RandomUtility: return "random_utility";
  }
  return "unknown";
}

inline ModelKind model_kind_from_string(const std::string& s) {
  if (s == "unidimensional") return ModelKind::Unidimensional;
  if (s == "issues") return ModelKind::Issues;
  if (s == "amici") return ModelKind::Amici;
  if (s == "random_utility") return ModelKind::RandomUtility;
  throw ValidationError("unknown model kind: " + s);
}

// Amici and RandomUtility share the amici-augmented vote equation.
inline bool kind_uses_amici(ModelKind k) {
  return k == ModelKind::Amici || k == ModelKind::RandomUtility;
}

// Case parameters kappa = (a, b, c_p, c_r): popularity, polarity, and the
// side-specific amicus polarities. c_p and c_r stay exactly 0 for model
// kinds that exclude them.
struct CaseParams {
  double a = 0.0;
  double b = 0.0;
  double c_p = 0.0;
  double c_r = 0.0;

  bool finite() const {
    return std::isfinite(a) && std::isfinite(b) && std::isfinite(c_p) &&
           std::isfinite(c_r);
  }
};

// Number of sampled kappa components for a model kind: (a, b) or
// (a, b, c_p, c_r).
inline int kappa_active_dims(ModelKind k) { return kind_uses_amici(k) ? 4 : 2; }

struct Hyperparams {
  double lambda = 1.0;       // justice prior component variance
  double rho = 0.5;          // shared off-diagonal covariance, sampled in (0,1)
  double sigma_kappa = 4.0;  // case parameter prior variance (diagonal)
  double eta = 1.0;          // utility influence exponent
  double xi = 1.0;           // framing cost weight

  void validate() const {
    if (!(lambda > 0.0)) throw ValidationError("lambda must be > 0");
    if (!(rho > 0.0 && rho < 1.0)) throw ValidationError("rho must be in (0,1)");
    if (!(sigma_kappa > 0.0)) throw ValidationError("sigma_kappa must be > 0");
    if (!(eta >= 0.0)) throw ValidationError("eta must be >= 0");
    if (!(xi > 0.0)) throw ValidationError("xi must be > 0");
  }
};

}  // namespace amicus
