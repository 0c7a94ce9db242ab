#pragma once

// JSON conversion for library reports. Internal: keeps nlohmann out of the
// installed headers.

#include <cmath>
#include <optional>
#include <vector>

#include <json.hpp>

#include "mixlap/certificates.hpp"

namespace mixlap::detail {

// Non-finite doubles become null; JSON has no NaN or infinity.
inline nlohmann::json number(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

inline nlohmann::json numbers(const std::vector<double>& v) {
  nlohmann::json a = nlohmann::json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

inline nlohmann::json optional_number(const std::optional<double>& v) {
  return v ? number(*v) : nlohmann::json(nullptr);
}

nlohmann::json certificate_json(const Certificate& c, bool with_grid = true);

}  // namespace mixlap::detail
