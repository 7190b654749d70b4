/**
 * @file antenna.hpp
 * @brief Uniform planar arrays, antenna-port configurations and the
 * sub-array (TXRU) partition that maps elements to ports.
 *
 * Element order: e = pol * (rows * cols) + col * rows + row.
 * Port order:    p = pol * (nH * nV) + h * nV + v.
 * The port order matches the codebook convention where the horizontal beam
 * index is the outer Kronecker factor.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nrmimo/matrix_array.hpp"

namespace nrmimo {

class PortConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline double degToRad(double d) { return d * std::numbers::pi / 180.0; }
inline double radToDeg(double r) { return r * 180.0 / std::numbers::pi; }

struct ArrayGeometry {
  int numRows = 1;  ///< vertical elements per polarization
  int numCols = 1;  ///< horizontal elements per polarization
  bool dualPolarized = false;
  double elementSpacingH = 0.5;  ///< wavelengths
  double elementSpacingV = 0.5;
  double bearingDeg = 0.0;
  double heightM = 1.5;
  std::vector<double> polarizationSlantsDeg = {0.0};
  double elementGainDbi = 0.0;

  int numPolarizations() const { return dualPolarized ? 2 : 1; }
  int elementsPerPolarization() const { return numRows * numCols; }
  int totalElements() const { return numRows * numCols * numPolarizations(); }

  /// Convenience: slants default to {0} or {0, 90}.
  static ArrayGeometry upa(int rows, int cols, bool dual, double bearingDeg = 0.0,
                           double heightM = 1.5, double gainDbi = 0.0) {
    ArrayGeometry g;
    g.numRows = rows;
    g.numCols = cols;
    g.dualPolarized = dual;
    g.bearingDeg = bearingDeg;
    g.heightM = heightM;
    g.elementGainDbi = gainDbi;
    g.polarizationSlantsDeg = dual ? std::vector<double>{0.0, 90.0} : std::vector<double>{0.0};
    return g;
  }
};

struct PortConfig {
  int nH = 1;
  int nV = 1;
  bool dualPolarized = false;

  int numPolarizations() const { return dualPolarized ? 2 : 1; }
  int numPorts() const { return nH * nV * numPolarizations(); }
};

/// Single-panel (N_h, N_v) port layouts supported for dual-polarized arrays,
/// keyed by total port count.
inline constexpr std::array<std::pair<int, int>, 14> kSupportedPortLayouts = {{
    {1, 1},                  // 2 ports
    {2, 1},                  // 4
    {2, 2}, {4, 1},          // 8
    {3, 2}, {6, 1},          // 12
    {4, 2}, {8, 1},          // 16
    {4, 3}, {6, 2}, {12, 1}, // 24
    {4, 4}, {8, 2}, {16, 1}, // 32
}};

inline bool isSupportedPortLayout(int nH, int nV) {
  return std::any_of(kSupportedPortLayouts.begin(), kSupportedPortLayouts.end(),
                     [&](const auto& p) { return p.first == nH && p.second == nV; });
}

/// Throws PortConfigError describing the first violated constraint.
inline void validatePortConfig(const PortConfig& cfg, const ArrayGeometry& geom) {
  if (cfg.nH < 1 || cfg.nV < 1) throw PortConfigError("port config: nH and nV must be >= 1");
  if (geom.numRows < 1 || geom.numCols < 1)
    throw PortConfigError("array geometry: rows and cols must be >= 1");
  if (cfg.dualPolarized != geom.dualPolarized)
    throw PortConfigError("port config polarization does not match the array");
  if (geom.polarizationSlantsDeg.size() != static_cast<std::size_t>(geom.numPolarizations()))
    throw PortConfigError("array geometry: one slant angle per polarization required");
  if (geom.numCols % cfg.nH != 0)
    throw PortConfigError("nH=" + std::to_string(cfg.nH) + " does not divide numCols=" +
                          std::to_string(geom.numCols));
  if (geom.numRows % cfg.nV != 0)
    throw PortConfigError("nV=" + std::to_string(cfg.nV) + " does not divide numRows=" +
                          std::to_string(geom.numRows));
  if (cfg.dualPolarized && !isSupportedPortLayout(cfg.nH, cfg.nV))
    throw PortConfigError("unsupported dual-polarized port layout (" + std::to_string(cfg.nH) +
                          "," + std::to_string(cfg.nV) + ")");
}

/// Element index sets per port. Each port is a contiguous co-polarized
/// (rows/nV) x (cols/nH) rectangle.
using PortMap = std::vector<std::vector<int>>;

inline PortMap elementToPortMap(const PortConfig& cfg, const ArrayGeometry& geom) {
  validatePortConfig(cfg, geom);
  const int rowsPerPort = geom.numRows / cfg.nV;
  const int colsPerPort = geom.numCols / cfg.nH;
  PortMap map;
  map.reserve(cfg.numPorts());
  for (int pol = 0; pol < cfg.numPolarizations(); ++pol) {
    for (int h = 0; h < cfg.nH; ++h) {
      for (int v = 0; v < cfg.nV; ++v) {
        std::vector<int> elems;
        elems.reserve(rowsPerPort * colsPerPort);
        for (int c = h * colsPerPort; c < (h + 1) * colsPerPort; ++c)
          for (int r = v * rowsPerPort; r < (v + 1) * rowsPerPort; ++r)
            elems.push_back(pol * geom.elementsPerPolarization() + c * geom.numRows + r);
        map.push_back(std::move(elems));
      }
    }
  }
  return map;
}

struct BeamDirection {
  double azimuthDeg = 0.0;  ///< global azimuth, from +x toward +y
  double zenithDeg = 90.0;  ///< from +z
};

/// Unit-magnitude UPA response over all elements. The array faces
/// `bearingDeg`; the horizontal axis is perpendicular to the boresight and
/// the vertical axis is z. Phase = 2*pi*(dH*col*sin(zen)*sin(az') + dV*row*cos(zen)).
inline std::vector<cd> steeringVector(const ArrayGeometry& geom, double azimuthDeg,
                                      double zenithDeg) {
  const double az = degToRad(azimuthDeg - geom.bearingDeg);
  const double zen = degToRad(zenithDeg);
  const double uH = std::sin(zen) * std::sin(az);
  const double uV = std::cos(zen);
  std::vector<cd> a(geom.totalElements());
  for (int pol = 0; pol < geom.numPolarizations(); ++pol)
    for (int c = 0; c < geom.numCols; ++c)
      for (int r = 0; r < geom.numRows; ++r) {
        const double phase =
            2.0 * std::numbers::pi * (geom.elementSpacingH * c * uH + geom.elementSpacingV * r * uV);
        a[pol * geom.elementsPerPolarization() + c * geom.numRows + r] = std::polar(1.0, phase);
      }
  return a;
}

inline std::vector<cd> steeringVector(const ArrayGeometry& geom, BeamDirection dir) {
  return steeringVector(geom, dir.azimuthDeg, dir.zenithDeg);
}

}  // namespace nrmimo
