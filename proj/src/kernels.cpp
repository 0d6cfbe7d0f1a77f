#include "lazyreg/kernels.hpp"

#include <string>

namespace lazyreg {

void validate_config(const RegConfig& cfg, const Schedule& sched) {
  if (!(sched.eta0 > 0.0) || !std::isfinite(sched.eta0))
    throw ContractViolation("config: eta0 must be positive and finite");
  if (!(cfg.lambda1 >= 0.0) || !std::isfinite(cfg.lambda1))
    throw ContractViolation("config: lambda1 must be non-negative and finite");
  if (!(cfg.lambda2 >= 0.0) || !std::isfinite(cfg.lambda2))
    throw ContractViolation("config: lambda2 must be non-negative and finite");
  if (cfg.algo == Algo::Sgd && cfg.lambda2 > 0.0 &&
      sched.eta0 * cfg.lambda2 >= 1.0)
    throw InvalidRate("sgd requires eta0 * lambda2 < 1, got " +
                      std::to_string(sched.eta0) + " * " +
                      std::to_string(cfg.lambda2) + " = " +
                      std::to_string(sched.eta0 * cfg.lambda2));
}

double sequential_oracle(double w, std::int64_t psi, std::int64_t k,
                         const RegConfig& cfg, const Schedule& sched) {
  detail::check_lazy_args(w, psi, k);
  double v = w;
  for (std::int64_t t = psi; t < k; ++t)
    v = cfg.algo == Algo::Sgd ? step_sgd_elastic(v, t, cfg, sched)
                              : step_fobos_elastic(v, t, cfg, sched);
  return v;
}

}  // namespace lazyreg
