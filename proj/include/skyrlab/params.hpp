#pragma once

#include <array>

#include "skyrlab/config.hpp"

namespace skyrlab {

struct MaterialParams {
  double Ms;         // saturation magnetization [A/m]
  double Aex;        // exchange stiffness [J/m]
  double Dmi;        // interfacial DMI [J/m^2]
  double Ku;         // uniaxial anisotropy [J/m^3]
  double alpha;      // Gilbert damping
  double thickness;  // film thickness [m]
};

struct DerivedScales {
  double l_ex;      // exchange length sqrt(2*Aex/(mu0*Ms^2)) [m]
  double delta_dw;  // wall width sqrt(Aex/Ku) [m]
  double k_eff;     // Ku - mu0*Ms^2/2, thin-film demag correction [J/m^3]
};

enum class TorqueKind { SotDampingLike, SttZhangLi };

struct DriveParams {
  double current_density;             // J [A/m^2]
  TorqueKind torque_kind;
  std::array<double, 3> polarization; // unit vector: SOT spin polarization / STT flow axis
  double spin_hall_angle;
  double nonadiabaticity_beta;        // STT only
  double polarization_p;              // STT spin polarization P
  std::array<double, 3> b_ext;        // external field [T]
};

MaterialParams material_from_config(const ExperimentConfig& cfg);
DriveParams drive_from_config(const ExperimentConfig& cfg);

// Throws NonPerpendicularEasyAxis when k_eff <= 0.
DerivedScales derive_scales(const MaterialParams& m);

}  // namespace skyrlab
