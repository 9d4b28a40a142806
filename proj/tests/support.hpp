#pragma once

#include <memory>
#include <string>
#include <vector>

#include "shadowlab/models.hpp"

namespace shadowlab::testing {

inline std::vector<std::string> model_names() {
  std::vector<std::string> out;
  for (const auto& m : model_registry()) out.push_back(m.name);
  return out;
}

// Cheap models for sweeps over the registry; the ODE is exercised separately.
inline std::vector<std::string> fast_model_names() {
  std::vector<std::string> out;
  for (const auto& m : model_registry())
    if (m.name != "lorenz-ode") out.push_back(m.name);
  return out;
}

}  // namespace shadowlab::testing
