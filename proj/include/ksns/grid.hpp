#pragma once

// Rectangular cell-centered grid and the discrete calculus built on it.
//
// Cells are stored row-major with x fastest: k = j*nx + i, cell (i, j) has
// center ((i + 1/2) hx, (j + 1/2) hy). Face-normal data lives on two arrays:
// x-faces ((nx+1)*ny, index j*(nx+1) + i, face between cells i-1 and i) and
// y-faces (nx*(ny+1), index j*nx + i, face between rows j-1 and j). Face
// values are the component along +x / +y, not the outward normal.
//
// Boundary faces are enumerated west (j = 0..ny-1), east (j), south
// (i = 0..nx-1), north (i). Per-boundary-face arrays (prescribed fluxes,
// residuals) follow that order and hold outward-normal quantities.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ksns {

struct DomainSpec {
  double lx = 1.0;
  double ly = 1.0;
  int nx = 4;
  int ny = 4;

  bool operator==(const DomainSpec&) const = default;
};

enum class Side { west, east, south, north };

struct BoundaryFace {
  Side side;
  int i;          // adjacent cell
  int j;
  double x;       // face center
  double y;
  double length;
  double normal_x;  // outward unit normal
  double normal_y;
};

class Grid {
 public:
  /// Throws std::invalid_argument for non-positive lengths or fewer than 4
  /// cells per direction.
  explicit Grid(const DomainSpec& spec);

  const DomainSpec& spec() const { return spec_; }
  int nx() const { return spec_.nx; }
  int ny() const { return spec_.ny; }
  double lx() const { return spec_.lx; }
  double ly() const { return spec_.ly; }
  double hx() const { return hx_; }
  double hy() const { return hy_; }
  double cell_volume() const { return hx_ * hy_; }
  double area() const { return spec_.lx * spec_.ly; }
  double perimeter() const { return 2.0 * (spec_.lx + spec_.ly); }

  std::size_t cell_count() const { return static_cast<std::size_t>(spec_.nx) * spec_.ny; }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * spec_.nx + i; }
  double xc(int i) const { return (i + 0.5) * hx_; }
  double yc(int j) const { return (j + 0.5) * hy_; }

  std::size_t x_face_count() const { return static_cast<std::size_t>(spec_.nx + 1) * spec_.ny; }
  std::size_t y_face_count() const { return static_cast<std::size_t>(spec_.nx) * (spec_.ny + 1); }
  std::size_t x_face(int i, int j) const { return static_cast<std::size_t>(j) * (spec_.nx + 1) + i; }
  std::size_t y_face(int i, int j) const { return static_cast<std::size_t>(j) * spec_.nx + i; }

  std::span<const BoundaryFace> boundary_faces() const { return faces_; }
  std::size_t boundary_face_count() const { return faces_.size(); }

  /// Total of hx*hy over all cells.
  double total_cell_volume() const;

 private:
  DomainSpec spec_;
  double hx_;
  double hy_;
  std::vector<BoundaryFace> faces_;
};

Grid build_grid(const DomainSpec& spec);

class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const Grid& grid, double value = 0.0);
  ScalarField(const DomainSpec& domain, std::vector<double> values);

  template <class F>
  static ScalarField sample(const Grid& grid, F&& f) {
    ScalarField out(grid);
    for (int j = 0; j < grid.ny(); ++j)
      for (int i = 0; i < grid.nx(); ++i) out.values_[grid.index(i, j)] = f(grid.xc(i), grid.yc(j));
    return out;
  }

  const DomainSpec& domain() const { return domain_; }
  std::size_t size() const { return values_.size(); }
  double& operator[](std::size_t k) { return values_[k]; }
  double operator[](std::size_t k) const { return values_[k]; }
  double& at(int i, int j) { return values_[static_cast<std::size_t>(j) * domain_.nx + i]; }
  double at(int i, int j) const { return values_[static_cast<std::size_t>(j) * domain_.nx + i]; }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  bool all_finite() const;

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(double s);
  ScalarField& operator+=(double s);

 private:
  DomainSpec domain_{};
  std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);

struct FaceFlux {
  std::vector<double> x;  // (nx+1)*ny
  std::vector<double> y;  // nx*(ny+1)
};

class VectorField {
 public:
  VectorField() = default;
  explicit VectorField(const Grid& grid);
  VectorField(ScalarField x, ScalarField y, std::optional<FaceFlux> faces = std::nullopt);

  template <class F>
  static VectorField sample(const Grid& grid, F&& f) {
    VectorField out(grid);
    for (int j = 0; j < grid.ny(); ++j) {
      for (int i = 0; i < grid.nx(); ++i) {
        const auto [vx, vy] = f(grid.xc(i), grid.yc(j));
        out.x_[grid.index(i, j)] = vx;
        out.y_[grid.index(i, j)] = vy;
      }
    }
    return out;
  }

  const DomainSpec& domain() const { return x_.domain(); }
  ScalarField& x() { return x_; }
  ScalarField& y() { return y_; }
  const ScalarField& x() const { return x_; }
  const ScalarField& y() const { return y_; }

  bool has_faces() const { return faces_.has_value(); }
  const FaceFlux& faces() const { return *faces_; }
  FaceFlux& faces() { return *faces_; }
  void set_faces(FaceFlux f);
  void clear_faces() { faces_.reset(); }

  bool all_finite() const;

  VectorField& operator*=(double s);

 private:
  ScalarField x_;
  ScalarField y_;
  std::optional<FaceFlux> faces_;
};

/// Throws std::invalid_argument when a field was built on a different grid.
void require_same_grid(const Grid& grid, const ScalarField& f);
void require_same_grid(const Grid& grid, const VectorField& v);

/// Midpoint rule: sum of f_i * hx * hy.
double integrate(const Grid& grid, const ScalarField& f);
double mean(const Grid& grid, const ScalarField& f);

enum class NormKind { lr, sup, w1r, w2r, w3r };

struct Norm {
  NormKind kind = NormKind::lr;
  double r = 2.0;

  static Norm lr(double r) { return {NormKind::lr, r}; }
  static Norm sup() { return {NormKind::sup, 1.0}; }
  static Norm w(int order, double r);
};

/// L^r, sup and W^{k,r} norms. Derivatives are taken with the same stencils
/// as gradient(): central in the interior, one-sided second order at the
/// boundary cells; W^{k,r} sums over multi-indices of order <= k.
double discrete_norm(const Grid& grid, const ScalarField& f, Norm norm);
double discrete_norm(const Grid& grid, const VectorField& v, Norm norm);

enum class Axis { x, y };

/// First derivative along one axis (central inside, one-sided 2nd order at
/// the first/last cell).
ScalarField derivative(const Grid& grid, const ScalarField& f, Axis axis);
VectorField gradient(const Grid& grid, const ScalarField& f);

/// Face-normal values for v: the stored faces when present; otherwise the
/// average of the two adjacent cells inside and a second-order extrapolation
/// of the cell values on the boundary.
FaceFlux face_values(const Grid& grid, const VectorField& v);

/// Finite-volume divergence of the face values of v (see face_values).
/// Interior contributions telescope, so integrate(divergence(v)) equals the
/// boundary normal flux sum to rounding.
ScalarField divergence(const Grid& grid, const VectorField& v);
ScalarField divergence(const Grid& grid, const FaceFlux& faces);

/// Outward normal component of face data on each boundary face.
std::vector<double> boundary_normal_flux(const Grid& grid, const FaceFlux& faces);

/// Sum over boundary faces of flux * face length.
double boundary_flux_sum(const Grid& grid, std::span<const double> boundary_flux);

/// FV Laplacian with the outward normal derivative prescribed on every
/// boundary face. Throws std::invalid_argument if boundary_flux does not
/// have one entry per boundary face.
ScalarField laplacian_with_flux(const Grid& grid, const ScalarField& f,
                                std::span<const double> boundary_flux);

/// Second-order extrapolation of cell values to a boundary face center.
double boundary_value(const Grid& grid, const ScalarField& f, const BoundaryFace& face);

struct Gradient2 {
  double x;
  double y;
};

/// Gradient at a boundary face center: one-sided second-order normal
/// derivative and the tangential derivative extrapolated from the cells.
Gradient2 boundary_gradient(const Grid& grid, const ScalarField& f, const BoundaryFace& face);

/// Outward normal derivative at every boundary face (one-sided).
std::vector<double> boundary_normal_derivative(const Grid& grid, const ScalarField& f);

}  // namespace ksns
