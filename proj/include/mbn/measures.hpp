#pragma once

#include "mbn/bloch.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mbn {

enum class MeasureKind { mbn, negativity, cm, gcm };

/// A named scalar evaluated on a bipartite state; the unit of sweeps and
/// tomography experiments.
struct Measure {
  std::string name;
  MeasureKind kind = MeasureKind::mbn;
  std::optional<IbmParams> params;  // mbn only; bipartition defaults when empty

  double operator()(const DensityMatrix& rho, const Bipartition& bip) const {
    switch (kind) {
      case MeasureKind::mbn: return mbn(rho, bip, params.value_or(IbmParams::defaults(bip)));
      case MeasureKind::negativity: return negativity(rho, bip);
      case MeasureKind::cm: return cm_value(rho, bip);
      case MeasureKind::gcm: return gcm_value(rho, bip);
    }
    throw Error(ErrorCode::internal, "unhandled measure kind");
  }

  static Measure parse(const std::string& name) {
    if (name == "mbn") return {name, MeasureKind::mbn, std::nullopt};
    if (name == "negativity") return {name, MeasureKind::negativity, std::nullopt};
    if (name == "cm") return {name, MeasureKind::cm, std::nullopt};
    if (name == "gcm") return {name, MeasureKind::gcm, std::nullopt};
    throw Error(ErrorCode::unknown_measure, "unknown measure '" + name + "'");
  }

  static Measure mbn_with(IbmParams p, std::string label = "mbn") {
    p.validate();
    return {std::move(label), MeasureKind::mbn, p};
  }
};

inline std::vector<Measure> parse_measures(const std::vector<std::string>& names) {
  std::vector<Measure> out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back(Measure::parse(n));
  return out;
}

}  // namespace mbn
