#include "ksns/presets.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ksns {

namespace {
constexpr double pi = std::numbers::pi;
}

DataPreset parse_data_preset(const std::string& name) {
  if (name == "constant") return DataPreset::constant;
  if (name == "small") return DataPreset::small;
  if (name == "mixed") return DataPreset::mixed;
  if (name == "vortex") return DataPreset::vortex;
  throw std::invalid_argument("unknown data preset '" + name + "'");
}

std::string to_string(DataPreset p) {
  switch (p) {
    case DataPreset::constant: return "constant";
    case DataPreset::small: return "small";
    case DataPreset::mixed: return "mixed";
    case DataPreset::vortex: return "vortex";
  }
  return "?";
}

SensitivitySpec make_sensitivity(const SensitivitySelector& sel) {
  switch (sel.kind) {
    case SensitivitySpec::Kind::identity: return SensitivitySpec::identity();
    case SensitivitySpec::Kind::scaled_identity: return SensitivitySpec::scaled(sel.a);
    case SensitivitySpec::Kind::rotation: return SensitivitySpec::rotation(sel.a, sel.b);
    case SensitivitySpec::Kind::custom: break;
  }
  throw std::invalid_argument("custom sensitivity has no selector form");
}

VectorField potential_gradient(const Grid& grid, const PotentialSelector& sel) {
  VectorField out(grid);
  if (sel.kind == PotentialSelector::Kind::linear_gravity) {
    for (double& v : out.y().values()) v = -sel.g;
  }
  return out;
}

ForcingFn make_forcing(const ForcingSelector& sel) {
  if (sel.kind == ForcingSelector::Kind::zero) return {};
  const double a = sel.amplitude;
  const double rate = sel.rate;
  return [a, rate](const Grid& grid, double t) {
    const double s = a * std::exp(-rate * t);
    const double ly = grid.ly();
    return VectorField::sample(grid, [&](double, double y) { return std::pair{s * std::sin(pi * y / ly), 0.0}; });
  };
}

VectorField stream_velocity(const Grid& grid, double amplitude) {
  const double lx = grid.lx();
  const double ly = grid.ly();
  return VectorField::sample(grid, [&](double x, double y) {
    const double sx = std::sin(pi * x / lx), sy = std::sin(pi * y / ly);
    // psi = sx^2 sy^2
    const double dpsi_dy = sx * sx * 2.0 * sy * std::cos(pi * y / ly) * pi / ly;
    const double dpsi_dx = sy * sy * 2.0 * sx * std::cos(pi * x / lx) * pi / lx;
    return std::pair{amplitude * dpsi_dy, -amplitude * dpsi_dx};
  });
}

GivenData make_data(const Grid& grid, const DataSelector& data, const SensitivitySelector& S,
                    const PotentialSelector& phi, const ForcingSelector& f) {
  const double lx = grid.lx();
  const double ly = grid.ly();
  const double A = data.amplitude;
  GivenData g;
  g.S = make_sensitivity(S);
  g.phi_grad = potential_gradient(grid, phi);
  g.f = make_forcing(f);
  switch (data.preset) {
    case DataPreset::constant:
      g.n0 = ScalarField(grid, data.n_mean);
      g.c0 = ScalarField(grid, data.n_mean);
      g.u0 = VectorField(grid);
      break;
    case DataPreset::small:
      g.n0 = ScalarField::sample(grid, [&](double x, double) { return data.n_mean + A * std::cos(pi * x / lx); });
      g.c0 = ScalarField::sample(grid, [&](double, double y) { return data.c_mean + A * std::cos(pi * y / ly); });
      g.u0 = VectorField(grid);
      break;
    case DataPreset::mixed:
      g.n0 = ScalarField::sample(grid, [&](double x, double y) {
        const double cx = std::cos(pi * x / lx);
        return data.n_mean + A * (cx + cx * std::cos(pi * y / ly));
      });
      g.c0 = ScalarField::sample(grid, [&](double, double y) { return data.c_mean + A * std::cos(pi * y / ly); });
      g.u0 = stream_velocity(grid, A);
      break;
    case DataPreset::vortex:
      g.n0 = ScalarField(grid, data.n_mean);
      g.c0 = ScalarField(grid, data.n_mean);
      g.u0 = stream_velocity(grid, A);
      break;
  }
  return g;
}

GivenData perturb_n0(const Grid& grid, const GivenData& data, double delta) {
  GivenData out = data;
  const double lx = grid.lx();
  const double ly = grid.ly();
  out.n0 += ScalarField::sample(
      grid, [&](double x, double y) { return delta * std::cos(pi * x / lx) * std::cos(pi * y / ly); });
  return out;
}

GivenData data_difference(const GivenData& a, const GivenData& b) {
  GivenData d = a;
  d.n0 = a.n0 - b.n0;
  d.c0 = a.c0 - b.c0;
  d.u0 = VectorField(a.u0.x() - b.u0.x(), a.u0.y() - b.u0.y());
  if (a.f || b.f) {
    ForcingFn fa = a.f, fb = b.f;
    d.f = [fa, fb](const Grid& grid, double t) {
      VectorField va = fa ? fa(grid, t) : VectorField(grid);
      VectorField vb = fb ? fb(grid, t) : VectorField(grid);
      return VectorField(va.x() - vb.x(), va.y() - vb.y());
    };
  }
  return d;
}

}  // namespace ksns
