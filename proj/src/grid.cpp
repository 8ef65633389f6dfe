#include "ksns/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ksns/simd.hpp"

namespace ksns {

namespace {

// Weights for extrapolating cell-centered values at distances h/2, 3h/2,
// 5h/2 from a face to the face itself, and for the derivative there.
constexpr double kExtrap[3] = {15.0 / 8.0, -10.0 / 8.0, 3.0 / 8.0};
constexpr double kFaceDeriv[3] = {-2.0, 3.0, -1.0};

void validate(const DomainSpec& s) {
  if (!(s.lx > 0.0) || !std::isfinite(s.lx)) throw std::invalid_argument("domain: lx must be positive");
  if (!(s.ly > 0.0) || !std::isfinite(s.ly)) throw std::invalid_argument("domain: ly must be positive");
  if (s.nx < 4) throw std::invalid_argument("domain: nx must be >= 4");
  if (s.ny < 4) throw std::invalid_argument("domain: ny must be >= 4");
}

}  // namespace

Grid::Grid(const DomainSpec& spec) : spec_(spec), hx_(0.0), hy_(0.0) {
  validate(spec);
  hx_ = spec.lx / spec.nx;
  hy_ = spec.ly / spec.ny;
  if (!std::isfinite(hx_) || !std::isfinite(hy_) || hx_ <= 0.0 || hy_ <= 0.0) {
    throw std::invalid_argument("domain: cell sizes must be finite and positive");
  }
  faces_.reserve(2 * static_cast<std::size_t>(spec.nx + spec.ny));
  for (int j = 0; j < spec.ny; ++j) faces_.push_back({Side::west, 0, j, 0.0, yc(j), hy_, -1.0, 0.0});
  for (int j = 0; j < spec.ny; ++j)
    faces_.push_back({Side::east, spec.nx - 1, j, spec.lx, yc(j), hy_, 1.0, 0.0});
  for (int i = 0; i < spec.nx; ++i) faces_.push_back({Side::south, i, 0, xc(i), 0.0, hx_, 0.0, -1.0});
  for (int i = 0; i < spec.nx; ++i)
    faces_.push_back({Side::north, i, spec.ny - 1, xc(i), spec.ly, hx_, 0.0, 1.0});
}

double Grid::total_cell_volume() const {
  double v = 0.0;
  for (std::size_t k = 0; k < cell_count(); ++k) v += hx_ * hy_;
  return v;
}

Grid build_grid(const DomainSpec& spec) { return Grid(spec); }

// ---------------------------------------------------------------------------
// Fields

ScalarField::ScalarField(const Grid& grid, double value)
    : domain_(grid.spec()), values_(grid.cell_count(), value) {}

ScalarField::ScalarField(const DomainSpec& domain, std::vector<double> values)
    : domain_(domain), values_(std::move(values)) {
  if (values_.size() != static_cast<std::size_t>(domain.nx) * domain.ny) {
    throw std::invalid_argument("ScalarField: value count does not match nx*ny");
  }
}

bool ScalarField::all_finite() const {
  for (double v : values_)
    if (!std::isfinite(v)) return false;
  return true;
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  if (!(o.domain_ == domain_)) throw std::invalid_argument("ScalarField: grid mismatch");
  simd::axpy(1.0, o.values_, values_);
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
  if (!(o.domain_ == domain_)) throw std::invalid_argument("ScalarField: grid mismatch");
  simd::axpy(-1.0, o.values_, values_);
  return *this;
}

ScalarField& ScalarField::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

ScalarField& ScalarField::operator+=(double s) {
  for (double& v : values_) v += s;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

VectorField::VectorField(const Grid& grid) : x_(grid), y_(grid) {}

VectorField::VectorField(ScalarField x, ScalarField y, std::optional<FaceFlux> faces)
    : x_(std::move(x)), y_(std::move(y)) {
  if (!(x_.domain() == y_.domain())) throw std::invalid_argument("VectorField: component grid mismatch");
  if (faces) set_faces(std::move(*faces));
}

void VectorField::set_faces(FaceFlux f) {
  const auto& d = x_.domain();
  if (f.x.size() != static_cast<std::size_t>(d.nx + 1) * d.ny ||
      f.y.size() != static_cast<std::size_t>(d.nx) * (d.ny + 1)) {
    throw std::invalid_argument("VectorField: face array size mismatch");
  }
  faces_ = std::move(f);
}

bool VectorField::all_finite() const {
  if (!x_.all_finite() || !y_.all_finite()) return false;
  if (faces_) {
    for (double v : faces_->x)
      if (!std::isfinite(v)) return false;
    for (double v : faces_->y)
      if (!std::isfinite(v)) return false;
  }
  return true;
}

VectorField& VectorField::operator*=(double s) {
  x_ *= s;
  y_ *= s;
  if (faces_) {
    for (double& v : faces_->x) v *= s;
    for (double& v : faces_->y) v *= s;
  }
  return *this;
}

void require_same_grid(const Grid& grid, const ScalarField& f) {
  if (!(f.domain() == grid.spec()) || f.size() != grid.cell_count()) {
    throw std::invalid_argument("field does not belong to this grid");
  }
}

void require_same_grid(const Grid& grid, const VectorField& v) {
  require_same_grid(grid, v.x());
  require_same_grid(grid, v.y());
}

// ---------------------------------------------------------------------------
// Integration and norms

double integrate(const Grid& grid, const ScalarField& f) {
  require_same_grid(grid, f);
  return simd::sum(f.values()) * grid.cell_volume();
}

double mean(const Grid& grid, const ScalarField& f) { return integrate(grid, f) / grid.area(); }

Norm Norm::w(int order, double r) {
  switch (order) {
    case 0: return {NormKind::lr, r};
    case 1: return {NormKind::w1r, r};
    case 2: return {NormKind::w2r, r};
    case 3: return {NormKind::w3r, r};
    default: throw std::invalid_argument("Norm::w: order must be 0..3");
  }
}

namespace {

double sum_abs_pow(const Grid& grid, const ScalarField& f, double r) {
  double s = 0.0;
  if (r == 2.0) {
    s = simd::dot(f.values(), f.values());
  } else {
    for (double v : f.values()) s += std::pow(std::fabs(v), r);
  }
  return s * grid.cell_volume();
}

int order_of(NormKind k) {
  switch (k) {
    case NormKind::w1r: return 1;
    case NormKind::w2r: return 2;
    case NormKind::w3r: return 3;
    default: return 0;
  }
}

// Sum of ||D^alpha f||_r^r over multi-indices |alpha| <= order.
double sobolev_sum(const Grid& grid, const ScalarField& f, int order, double r) {
  double total = sum_abs_pow(grid, f, r);
  // dx[a] = d^a f / dx^a
  std::vector<ScalarField> dx{f};
  for (int a = 1; a <= order; ++a) dx.push_back(derivative(grid, dx.back(), Axis::x));
  for (int m = 1; m <= order; ++m) {
    for (int a = 0; a <= m; ++a) {
      ScalarField d = dx[a];
      for (int b = 0; b < m - a; ++b) d = derivative(grid, d, Axis::y);
      total += sum_abs_pow(grid, d, r);
    }
  }
  return total;
}

}  // namespace

double discrete_norm(const Grid& grid, const ScalarField& f, Norm norm) {
  require_same_grid(grid, f);
  if (norm.kind == NormKind::sup) return simd::max_abs(f.values());
  if (!(norm.r >= 1.0) || !std::isfinite(norm.r)) throw std::invalid_argument("discrete_norm: r must be >= 1");
  return std::pow(sobolev_sum(grid, f, order_of(norm.kind), norm.r), 1.0 / norm.r);
}

double discrete_norm(const Grid& grid, const VectorField& v, Norm norm) {
  require_same_grid(grid, v);
  if (norm.kind == NormKind::sup) {
    double m = 0.0;
    for (std::size_t k = 0; k < v.x().size(); ++k) m = std::max(m, std::hypot(v.x()[k], v.y()[k]));
    return m;
  }
  if (!(norm.r >= 1.0) || !std::isfinite(norm.r)) throw std::invalid_argument("discrete_norm: r must be >= 1");
  const int k = order_of(norm.kind);
  return std::pow(sobolev_sum(grid, v.x(), k, norm.r) + sobolev_sum(grid, v.y(), k, norm.r), 1.0 / norm.r);
}

// ---------------------------------------------------------------------------
// Differences

ScalarField derivative(const Grid& grid, const ScalarField& f, Axis axis) {
  require_same_grid(grid, f);
  ScalarField out(grid);
  const int nx = grid.nx();
  const int ny = grid.ny();
  if (axis == Axis::x) {
    const double inv2h = 0.5 / grid.hx();
    for (int j = 0; j < ny; ++j) {
      out.at(0, j) = (-3.0 * f.at(0, j) + 4.0 * f.at(1, j) - f.at(2, j)) * inv2h;
      for (int i = 1; i < nx - 1; ++i) out.at(i, j) = (f.at(i + 1, j) - f.at(i - 1, j)) * inv2h;
      out.at(nx - 1, j) = (3.0 * f.at(nx - 1, j) - 4.0 * f.at(nx - 2, j) + f.at(nx - 3, j)) * inv2h;
    }
  } else {
    const double inv2h = 0.5 / grid.hy();
    for (int i = 0; i < nx; ++i) {
      out.at(i, 0) = (-3.0 * f.at(i, 0) + 4.0 * f.at(i, 1) - f.at(i, 2)) * inv2h;
      out.at(i, ny - 1) = (3.0 * f.at(i, ny - 1) - 4.0 * f.at(i, ny - 2) + f.at(i, ny - 3)) * inv2h;
    }
    for (int j = 1; j < ny - 1; ++j)
      for (int i = 0; i < nx; ++i) out.at(i, j) = (f.at(i, j + 1) - f.at(i, j - 1)) * inv2h;
  }
  return out;
}

VectorField gradient(const Grid& grid, const ScalarField& f) {
  return VectorField(derivative(grid, f, Axis::x), derivative(grid, f, Axis::y));
}

FaceFlux face_values(const Grid& grid, const VectorField& v) {
  require_same_grid(grid, v);
  if (v.has_faces()) return v.faces();
  const int nx = grid.nx();
  const int ny = grid.ny();
  FaceFlux f{std::vector<double>(grid.x_face_count()), std::vector<double>(grid.y_face_count())};
  const auto& vx = v.x();
  const auto& vy = v.y();
  for (int j = 0; j < ny; ++j) {
    f.x[grid.x_face(0, j)] = kExtrap[0] * vx.at(0, j) + kExtrap[1] * vx.at(1, j) + kExtrap[2] * vx.at(2, j);
    for (int i = 1; i < nx; ++i) f.x[grid.x_face(i, j)] = 0.5 * (vx.at(i - 1, j) + vx.at(i, j));
    f.x[grid.x_face(nx, j)] =
        kExtrap[0] * vx.at(nx - 1, j) + kExtrap[1] * vx.at(nx - 2, j) + kExtrap[2] * vx.at(nx - 3, j);
  }
  for (int i = 0; i < nx; ++i) {
    f.y[grid.y_face(i, 0)] = kExtrap[0] * vy.at(i, 0) + kExtrap[1] * vy.at(i, 1) + kExtrap[2] * vy.at(i, 2);
    f.y[grid.y_face(i, ny)] =
        kExtrap[0] * vy.at(i, ny - 1) + kExtrap[1] * vy.at(i, ny - 2) + kExtrap[2] * vy.at(i, ny - 3);
  }
  for (int j = 1; j < ny; ++j)
    for (int i = 0; i < nx; ++i) f.y[grid.y_face(i, j)] = 0.5 * (vy.at(i, j - 1) + vy.at(i, j));
  return f;
}

ScalarField divergence(const Grid& grid, const FaceFlux& faces) {
  if (faces.x.size() != grid.x_face_count() || faces.y.size() != grid.y_face_count()) {
    throw std::invalid_argument("divergence: face array size mismatch");
  }
  ScalarField out(grid);
  const double ihx = 1.0 / grid.hx();
  const double ihy = 1.0 / grid.hy();
  for (int j = 0; j < grid.ny(); ++j) {
    for (int i = 0; i < grid.nx(); ++i) {
      out.at(i, j) = (faces.x[grid.x_face(i + 1, j)] - faces.x[grid.x_face(i, j)]) * ihx +
                     (faces.y[grid.y_face(i, j + 1)] - faces.y[grid.y_face(i, j)]) * ihy;
    }
  }
  return out;
}

ScalarField divergence(const Grid& grid, const VectorField& v) { return divergence(grid, face_values(grid, v)); }

std::vector<double> boundary_normal_flux(const Grid& grid, const FaceFlux& faces) {
  std::vector<double> out;
  out.reserve(grid.boundary_face_count());
  for (const auto& f : grid.boundary_faces()) {
    switch (f.side) {
      case Side::west: out.push_back(-faces.x[grid.x_face(0, f.j)]); break;
      case Side::east: out.push_back(faces.x[grid.x_face(grid.nx(), f.j)]); break;
      case Side::south: out.push_back(-faces.y[grid.y_face(f.i, 0)]); break;
      case Side::north: out.push_back(faces.y[grid.y_face(f.i, grid.ny())]); break;
    }
  }
  return out;
}

double boundary_flux_sum(const Grid& grid, std::span<const double> boundary_flux) {
  if (boundary_flux.size() != grid.boundary_face_count()) {
    throw std::invalid_argument("boundary flux must have one entry per boundary face");
  }
  double s = 0.0;
  const auto faces = grid.boundary_faces();
  for (std::size_t k = 0; k < faces.size(); ++k) s += boundary_flux[k] * faces[k].length;
  return s;
}

ScalarField laplacian_with_flux(const Grid& grid, const ScalarField& f, std::span<const double> boundary_flux) {
  require_same_grid(grid, f);
  if (boundary_flux.size() != grid.boundary_face_count()) {
    throw std::invalid_argument("laplacian_with_flux: one flux entry per boundary face required");
  }
  ScalarField out(grid);
  const simd::StencilCoeffs neg_lap{grid.nx(), grid.ny(), 0.0, 1.0 / (grid.hx() * grid.hx()),
                                    1.0 / (grid.hy() * grid.hy()), false};
  simd::apply_stencil(neg_lap, f.values(), out.values());
  out *= -1.0;
  const double vol = grid.cell_volume();
  const auto faces = grid.boundary_faces();
  for (std::size_t k = 0; k < faces.size(); ++k) {
    out.at(faces[k].i, faces[k].j) += boundary_flux[k] * faces[k].length / vol;
  }
  return out;
}

double boundary_value(const Grid& grid, const ScalarField& f, const BoundaryFace& face) {
  const int nx = grid.nx();
  const int ny = grid.ny();
  double v = 0.0;
  for (int m = 0; m < 3; ++m) {
    switch (face.side) {
      case Side::west: v += kExtrap[m] * f.at(m, face.j); break;
      case Side::east: v += kExtrap[m] * f.at(nx - 1 - m, face.j); break;
      case Side::south: v += kExtrap[m] * f.at(face.i, m); break;
      case Side::north: v += kExtrap[m] * f.at(face.i, ny - 1 - m); break;
    }
  }
  return v;
}

namespace {

double derivative_at(const Grid& grid, const ScalarField& f, Axis axis, int i, int j) {
  if (axis == Axis::x) {
    const int n = grid.nx();
    const double inv2h = 0.5 / grid.hx();
    if (i == 0) return (-3.0 * f.at(0, j) + 4.0 * f.at(1, j) - f.at(2, j)) * inv2h;
    if (i == n - 1) return (3.0 * f.at(n - 1, j) - 4.0 * f.at(n - 2, j) + f.at(n - 3, j)) * inv2h;
    return (f.at(i + 1, j) - f.at(i - 1, j)) * inv2h;
  }
  const int n = grid.ny();
  const double inv2h = 0.5 / grid.hy();
  if (j == 0) return (-3.0 * f.at(i, 0) + 4.0 * f.at(i, 1) - f.at(i, 2)) * inv2h;
  if (j == n - 1) return (3.0 * f.at(i, n - 1) - 4.0 * f.at(i, n - 2) + f.at(i, n - 3)) * inv2h;
  return (f.at(i, j + 1) - f.at(i, j - 1)) * inv2h;
}

// Derivative along the inward direction at the face, from the first three
// cells in the normal column/row.
double inward_derivative(const Grid& grid, const ScalarField& f, const BoundaryFace& face) {
  const int nx = grid.nx();
  const int ny = grid.ny();
  double d = 0.0;
  for (int m = 0; m < 3; ++m) {
    switch (face.side) {
      case Side::west: d += kFaceDeriv[m] * f.at(m, face.j); break;
      case Side::east: d += kFaceDeriv[m] * f.at(nx - 1 - m, face.j); break;
      case Side::south: d += kFaceDeriv[m] * f.at(face.i, m); break;
      case Side::north: d += kFaceDeriv[m] * f.at(face.i, ny - 1 - m); break;
    }
  }
  const bool xface = face.side == Side::west || face.side == Side::east;
  return d / (xface ? grid.hx() : grid.hy());
}

}  // namespace

Gradient2 boundary_gradient(const Grid& grid, const ScalarField& f, const BoundaryFace& face) {
  const double inward = inward_derivative(grid, f, face);
  const bool xface = face.side == Side::west || face.side == Side::east;
  // Tangential derivative in the three nearest cells of the normal column,
  // extrapolated to the face.
  const int nx = grid.nx();
  const int ny = grid.ny();
  double t = 0.0;
  for (int m = 0; m < 3; ++m) {
    switch (face.side) {
      case Side::west: t += kExtrap[m] * derivative_at(grid, f, Axis::y, m, face.j); break;
      case Side::east: t += kExtrap[m] * derivative_at(grid, f, Axis::y, nx - 1 - m, face.j); break;
      case Side::south: t += kExtrap[m] * derivative_at(grid, f, Axis::x, face.i, m); break;
      case Side::north: t += kExtrap[m] * derivative_at(grid, f, Axis::x, face.i, ny - 1 - m); break;
    }
  }
  const double normal = -inward;
  if (xface) return {normal * face.normal_x, t};
  return {t, normal * face.normal_y};
}

std::vector<double> boundary_normal_derivative(const Grid& grid, const ScalarField& f) {
  require_same_grid(grid, f);
  std::vector<double> out;
  out.reserve(grid.boundary_face_count());
  for (const auto& face : grid.boundary_faces()) out.push_back(-inward_derivative(grid, f, face));
  return out;
}

}  // namespace ksns
