#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "martvar/common.hpp"

namespace martvar {

/// Checked numerical inequality lhs <= rhs.
///
/// slack = rhs - lhs; the certificate holds iff slack >= -1e-9. Equality
/// claims are encoded as lhs = |difference|, rhs = 0, so they hold iff the
/// difference is within the same tolerance.
struct BoundCertificate {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool holds = false;

  static BoundCertificate make(std::string name, double lhs, double rhs) {
    BoundCertificate c;
    c.name = std::move(name);
    c.lhs = lhs;
    c.rhs = rhs;
    c.slack = rhs - lhs;
    c.holds = c.slack >= -kCertTolerance;
    return c;
  }

  nlohmann::json to_json() const {
    return nlohmann::json{
        {"name", name}, {"lhs", lhs}, {"rhs", rhs}, {"slack", slack}, {"holds", holds}};
  }
};

}  // namespace martvar
