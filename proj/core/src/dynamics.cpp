#include "fairdyn/dynamics.hpp"

#include <algorithm>
#include <string>

#include "fairdyn/error.hpp"
#include "fairdyn/specfun.hpp"

namespace fairdyn {
namespace {

void check_unit(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) throw DomainError(std::string(name) + " must lie in [0,1], got " + std::to_string(v));
}

struct Selection {
  double p_plus;
  double mu_plus;
};

Selection select(double A, const PopulationState& state) {
  check_unit(A, "threshold");
  state.validate();
  if (A <= 0.0) return {1.0, state.mu};
  const auto tail = specfun::upper_tail(A, state.mu, state.c);
  if (tail.proportion <= 0.0) return {0.0, A};
  const double m = std::clamp(tail.moment / tail.proportion, std::max(state.mu, A), 1.0);
  return {tail.proportion, m};
}

}  // namespace

void DynamicsParams::validate() const {
  check_unit(beta, "dynamics.beta");
  check_unit(nu, "dynamics.nu");
  check_unit(alpha, "dynamics.alpha");
}

StepResult step(double A, const PopulationState& state, const DynamicsParams& params) {
  params.validate();
  const Selection sel = select(A, state);
  StepResult out{sel.p_plus, sel.mu_plus, params.nu};
  if (sel.p_plus > 0.0) {
    const double quality = (1.0 - params.alpha) * sel.mu_plus + params.alpha * state.mu;
    out.next = params.beta * sel.p_plus * quality + params.nu * (1.0 - sel.p_plus);
  }
  out.next = std::clamp(out.next, 0.0, 1.0);
  return out;
}

double step_mean(double A, const PopulationState& state, const DynamicsParams& params) {
  return step(A, state, params).next;
}

double misestimation_sensitivity(double A, const PopulationState& state,
                                 const DynamicsParams& params) {
  params.validate();
  const Selection sel = select(A, state);
  if (sel.p_plus <= 0.0) return 0.0;
  return params.beta * sel.p_plus * (state.mu - sel.mu_plus);
}

}  // namespace fairdyn
