#include "skyrlab/params.hpp"

#include <cmath>
#include <limits>

#include "skyrlab/constants.hpp"
#include "skyrlab/error.hpp"

namespace skyrlab {

MaterialParams material_from_config(const ExperimentConfig& cfg) {
  MaterialParams m;
  m.Ms = cfg.num("material", "Ms");
  m.Aex = cfg.num("material", "Aex");
  m.Dmi = cfg.num("material", "Dmi");
  m.Ku = cfg.num("material", "Ku");
  m.alpha = cfg.num("material", "alpha");
  m.thickness = cfg.num("material", "thickness");
  return m;
}

DriveParams drive_from_config(const ExperimentConfig& cfg) {
  DriveParams d;
  d.current_density = cfg.num("drive", "current_density");
  d.torque_kind = cfg.token("drive", "torque_kind") == "stt" ? TorqueKind::SttZhangLi
                                                             : TorqueKind::SotDampingLike;
  d.polarization = {cfg.num("drive", "polarization_x"),
                    cfg.num("drive", "polarization_y"),
                    cfg.num("drive", "polarization_z")};
  double n = std::sqrt(d.polarization[0] * d.polarization[0] +
                       d.polarization[1] * d.polarization[1] +
                       d.polarization[2] * d.polarization[2]);
  for (auto& c : d.polarization) c /= n;
  d.spin_hall_angle = cfg.num("drive", "spin_hall_angle");
  d.nonadiabaticity_beta = cfg.num("drive", "nonadiabaticity_beta");
  d.polarization_p = cfg.num("drive", "polarization_p");
  d.b_ext = {cfg.num("drive", "b_ext_x"), cfg.num("drive", "b_ext_y"),
             cfg.num("drive", "b_ext_z")};
  return d;
}

DerivedScales derive_scales(const MaterialParams& m) {
  DerivedScales s;
  s.l_ex = std::sqrt(2.0 * m.Aex / (constants::mu0 * m.Ms * m.Ms));
  s.delta_dw = m.Ku > 0 ? std::sqrt(m.Aex / m.Ku)
                        : std::numeric_limits<double>::infinity();
  s.k_eff = m.Ku - 0.5 * constants::mu0 * m.Ms * m.Ms;
  if (s.k_eff <= 0) {
    throw Error(ErrorKind::NonPerpendicularEasyAxis,
                "k_eff = " + format_double(s.k_eff) +
                    " J/m^3; Ku must exceed mu0*Ms^2/2 for an out-of-plane easy axis");
  }
  return s;
}

}  // namespace skyrlab
