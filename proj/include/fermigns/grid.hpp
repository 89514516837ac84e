#pragma once

#include <array>
#include <cstddef>

namespace fermigns {

/// Uniform periodic cubic sampling of the box center + [-L/2, L/2)^3.
///
/// Sample i along an axis sits at center + (i - n/2) h, so the center is
/// itself a grid point. Storage is row-major with z fastest:
/// flat = (ix * n + iy) * n + iz. The frequency attached to storage index k
/// is 2 pi s / L with s = k for k < n/2 and s = k - n otherwise, i.e. the
/// lattice {-n/2, ..., n/2 - 1}.
class Grid {
 public:
  Grid() = default;

  double box_length() const { return box_length_; }
  int points() const { return points_; }
  double spacing() const { return box_length_ / points_; }
  double cell_volume() const {
    const double h = spacing();
    return h * h * h;
  }
  std::size_t size() const {
    const auto n = static_cast<std::size_t>(points_);
    return n * n * n;
  }
  const std::array<double, 3>& center() const { return center_; }

  double coordinate(int axis, int i) const {
    return center_[axis] + (i - points_ / 2) * spacing();
  }
  /// Signed lattice index s in {-n/2, ..., n/2 - 1} of storage index k.
  int signed_index(int k) const { return k < points_ / 2 ? k : k - points_; }
  /// Inverse of signed_index.
  int storage_index(int s) const { return s >= 0 ? s : s + points_; }
  double frequency(int k) const;

  std::size_t flat(int ix, int iy, int iz) const {
    const auto n = static_cast<std::size_t>(points_);
    return (static_cast<std::size_t>(ix) * n + static_cast<std::size_t>(iy)) * n +
           static_cast<std::size_t>(iz);
  }

  /// Same samples read on a box scaled by `factor` around a new center.
  /// A field u on this grid re-read on the result is x -> u(x / factor)
  /// (up to the shift of centers).
  Grid rescaled(double factor) const;
  Grid recentered(const std::array<double, 3>& center) const;

  bool operator==(const Grid& other) const = default;

 private:
  friend Grid make_grid(double, int, const std::array<double, 3>&);
  double box_length_ = 0.0;
  int points_ = 0;
  std::array<double, 3> center_{0.0, 0.0, 0.0};
};

/// Validates and builds a grid. Requires L > 0 and an even n >= 4.
Grid make_grid(double box_length, int points,
               const std::array<double, 3>& center = {0.0, 0.0, 0.0});

/// Throws InputError unless both grids sample the same box with the same n.
void require_same_grid(const Grid& a, const Grid& b, const char* context);

}  // namespace fermigns
