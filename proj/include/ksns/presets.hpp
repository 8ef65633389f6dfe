#pragma once

// Named initial data, sensitivities, potentials and forcings.
//
//   constant: n = c = n_mean, u = 0 (the constant steady state)
//   small:    n = n_mean + A cos(pi x/Lx), c = c_mean + A cos(pi y/Ly), u = 0
//   mixed:    n = n_mean + A (cos(pi x/Lx) + cos(pi x/Lx) cos(pi y/Ly)),
//             c = c_mean + A cos(pi y/Ly), u = A curl(psi)
//   vortex:   n = c = n_mean, u = A curl(psi)
// with psi = sin^2(pi x/Lx) sin^2(pi y/Ly), curl(psi) = (d_y psi, -d_x psi).

#include <string>

#include "ksns/grid.hpp"
#include "ksns/model.hpp"

namespace ksns {

enum class DataPreset { constant, small, mixed, vortex };

struct DataSelector {
  DataPreset preset = DataPreset::small;
  double amplitude = 0.01;
  double n_mean = 2.0;
  double c_mean = 2.0;
};

struct SensitivitySelector {
  SensitivitySpec::Kind kind = SensitivitySpec::Kind::identity;
  double a = 1.0;
  double b = 0.0;
};

struct PotentialSelector {
  enum class Kind { zero, linear_gravity } kind = Kind::zero;
  double g = 1.0;  // phi = -g y
};

struct ForcingSelector {
  enum class Kind { zero, decaying } kind = Kind::zero;
  double amplitude = 0.01;
  double rate = 1.0;  // f = A e^{-rate t} (sin(pi y/Ly), 0)
};

DataPreset parse_data_preset(const std::string& name);
std::string to_string(DataPreset p);

SensitivitySpec make_sensitivity(const SensitivitySelector& sel);
VectorField potential_gradient(const Grid& grid, const PotentialSelector& sel);
ForcingFn make_forcing(const ForcingSelector& sel);

/// A curl(psi): divergence-free, zero on the wall.
VectorField stream_velocity(const Grid& grid, double amplitude);

GivenData make_data(const Grid& grid, const DataSelector& data, const SensitivitySelector& S,
                    const PotentialSelector& phi, const ForcingSelector& f);

/// n0 + delta cos(pi x/Lx) cos(pi y/Ly); keeps the mean of n0 and the
/// hypotheses on c0, u0.
GivenData perturb_n0(const Grid& grid, const GivenData& data, double delta);

/// Componentwise data difference a - b (S and phi taken from a); f is the
/// difference of the forcings.
GivenData data_difference(const GivenData& a, const GivenData& b);

}  // namespace ksns
