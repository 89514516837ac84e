#include "fermigns/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "fermigns/error.hpp"
#include "fermigns/fft.hpp"

namespace fermigns {

namespace {

template <class Fn>
void for_each_mode(const Grid& g, Fn&& fn) {
  const int n = g.points();
  for (int ix = 0; ix < n; ++ix) {
    const double fx = g.frequency(ix);
    for (int iy = 0; iy < n; ++iy) {
      const double fy = g.frequency(iy);
      for (int iz = 0; iz < n; ++iz) {
        const double fz = g.frequency(iz);
        fn(g.flat(ix, iy, iz), fx, fy, fz);
      }
    }
  }
}

}  // namespace

Field apply_radial_multiplier(const Field& u, const std::function<double(double)>& of_xi2) {
  const Grid& g = u.grid();
  auto& fft = detail::complex_fft(g.points());
  auto buf = fft.buffer();
  std::copy(u.values().begin(), u.values().end(), buf.begin());
  fft.forward();
  const double scale = 1.0 / static_cast<double>(g.size());
  for_each_mode(g, [&](std::size_t i, double fx, double fy, double fz) {
    buf[i] *= scale * of_xi2(fx * fx + fy * fy + fz * fz);
  });
  fft.backward();
  Field out(g, u.tag());
  std::copy(buf.begin(), buf.end(), out.values().begin());
  return out;
}

double radial_multiplier_form(const Field& u, const std::function<double(double)>& of_xi2) {
  const Grid& g = u.grid();
  auto& fft = detail::complex_fft(g.points());
  auto buf = fft.buffer();
  std::copy(u.values().begin(), u.values().end(), buf.begin());
  fft.forward();
  double acc = 0.0;
  for_each_mode(g, [&](std::size_t i, double fx, double fy, double fz) {
    acc += std::norm(buf[i]) * of_xi2(fx * fx + fy * fy + fz * fz);
  });
  // Parseval: h^3 sum |u|^2 = h^3 / n^3 sum |F|^2.
  return acc * g.cell_volume() / static_cast<double>(g.size());
}

Field translate(const Field& u, const std::array<double, 3>& shift) {
  const Grid& g = u.grid();
  auto& fft = detail::complex_fft(g.points());
  auto buf = fft.buffer();
  std::copy(u.values().begin(), u.values().end(), buf.begin());
  fft.forward();
  const double scale = 1.0 / static_cast<double>(g.size());
  const int half = g.points() / 2;
  const int n = g.points();
  for (int ix = 0; ix < n; ++ix) {
    for (int iy = 0; iy < n; ++iy) {
      for (int iz = 0; iz < n; ++iz) {
        // The Nyquist component cannot be shifted consistently for real data;
        // keep its real part's magnitude by using cos of the phase.
        const double fx = g.frequency(ix), fy = g.frequency(iy), fz = g.frequency(iz);
        const double phase = -(fx * shift[0] + fy * shift[1] + fz * shift[2]);
        const bool nyquist = ix == half || iy == half || iz == half;
        const cplx factor = nyquist ? cplx(std::cos(phase), 0.0) : std::polar(1.0, phase);
        buf[g.flat(ix, iy, iz)] *= scale * factor;
      }
    }
  }
  fft.backward();
  Field out(g, u.tag());
  std::copy(buf.begin(), buf.end(), out.values().begin());
  return out;
}

Field resample(const Field& u, int points) {
  const Grid& src = u.grid();
  const Grid dst = make_grid(src.box_length(), points, src.center());
  if (points == src.points()) return u;
  auto& fin = detail::complex_fft(src.points());
  auto ibuf = fin.buffer();
  std::copy(u.values().begin(), u.values().end(), ibuf.begin());
  fin.forward();
  std::vector<cplx> spec(ibuf.begin(), ibuf.end());

  auto& fout = detail::complex_fft(points);
  auto obuf = fout.buffer();
  std::fill(obuf.begin(), obuf.end(), cplx{0.0, 0.0});
  // Keep the symmetric band |s| < min(n, m)/2; the unpaired Nyquist row is dropped.
  const int band = std::min(src.points(), points) / 2;
  const double scale = 1.0 / static_cast<double>(src.size());
  for (int sx = -band + 1; sx < band; ++sx) {
    for (int sy = -band + 1; sy < band; ++sy) {
      for (int sz = -band + 1; sz < band; ++sz) {
        const auto si = src.flat(src.storage_index(sx), src.storage_index(sy), src.storage_index(sz));
        const auto di = dst.flat(dst.storage_index(sx), dst.storage_index(sy), dst.storage_index(sz));
        obuf[di] = spec[si] * scale;
      }
    }
  }
  fout.backward();
  Field out(dst, u.tag());
  std::copy(obuf.begin(), obuf.end(), out.values().begin());
  return out;
}

Field dilate(const Field& u, double lambda) {
  if (!(lambda > 0.0)) throw InputError("dilation factor must be positive");
  const Grid& g = u.grid();
  const int n = g.points();
  const double h = g.spacing();
  const double L = g.box_length();
  // Periodic cardinal function with the Nyquist mode taken as a cosine.
  auto cardinal = [&](double d) {
    double acc = std::cos(M_PI * n * d / L);
    for (int s = 1; s < n / 2; ++s) acc += 2.0 * std::cos(2.0 * M_PI * s * d / L);
    return (1.0 + acc) / n;
  };
  std::vector<double> m(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    const double y = (i - n / 2) * h / lambda;
    for (int j = 0; j < n; ++j) m[static_cast<std::size_t>(i) * n + j] = cardinal(y - (j - n / 2) * h);
  }
  std::vector<cplx> a(u.values().begin(), u.values().end());
  std::vector<cplx> b(a.size());
  const auto nn = static_cast<std::size_t>(n);
  for (int axis = 0; axis < 3; ++axis) {
    // Stride of the active axis in the flat layout.
    const std::size_t stride = axis == 0 ? nn * nn : (axis == 1 ? nn : 1);
    for (std::size_t base = 0; base < a.size(); ++base) {
      const std::size_t pos = (base / stride) % nn;
      if (pos != 0) continue;
      for (int i = 0; i < n; ++i) {
        cplx acc{0.0, 0.0};
        const double* row = &m[static_cast<std::size_t>(i) * n];
        for (int j = 0; j < n; ++j) acc += row[j] * a[base + static_cast<std::size_t>(j) * stride];
        b[base + static_cast<std::size_t>(i) * stride] = acc;
      }
    }
    std::swap(a, b);
  }
  const double amp = std::pow(lambda, -1.5);
  for (auto& v : a) v *= amp;
  return Field(g, std::move(a), u.tag());
}

Field partial_derivative(const Field& u, int axis) {
  if (axis < 0 || axis > 2) throw InputError("axis must be 0, 1 or 2");
  const Grid& g = u.grid();
  auto& fft = detail::complex_fft(g.points());
  auto buf = fft.buffer();
  std::copy(u.values().begin(), u.values().end(), buf.begin());
  fft.forward();
  const double scale = 1.0 / static_cast<double>(g.size());
  const int n = g.points();
  const int half = n / 2;
  for (int ix = 0; ix < n; ++ix) {
    for (int iy = 0; iy < n; ++iy) {
      for (int iz = 0; iz < n; ++iz) {
        const int k = axis == 0 ? ix : (axis == 1 ? iy : iz);
        const double xi = k == half ? 0.0 : g.frequency(k);
        buf[g.flat(ix, iy, iz)] *= cplx(0.0, xi * scale);
      }
    }
  }
  fft.backward();
  Field out(g, u.tag());
  std::copy(buf.begin(), buf.end(), out.values().begin());
  return out;
}

Field radial_derivative(const Field& f) {
  const Grid& g = f.grid();
  Field out(g, f.tag());
  const int n = g.points();
  for (int axis = 0; axis < 3; ++axis) {
    const Field d = partial_derivative(f, axis);
    for (int ix = 0; ix < n; ++ix) {
      for (int iy = 0; iy < n; ++iy) {
        for (int iz = 0; iz < n; ++iz) {
          const int i = axis == 0 ? ix : (axis == 1 ? iy : iz);
          const double x = g.coordinate(axis, i) - g.center()[axis];
          const auto idx = g.flat(ix, iy, iz);
          out[idx] += x * d[idx];
        }
      }
    }
  }
  return out;
}

}  // namespace fermigns
