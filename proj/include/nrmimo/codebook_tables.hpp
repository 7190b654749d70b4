/**
 * @file codebook_tables.hpp
 * @brief Type-I single-panel constants transcribed from 3GPP TS 38.214
 * (Rel-15) section 5.2.2.2.1.
 */
#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

namespace nrmimo::tables {

/// Table 5.2.2.2.1-2: (O1, O2) for a given (N1, N2).
/// O1 = 4 for every supported layout; O2 = 4 when N2 > 1, else 1.
inline std::pair<int, int> defaultOversampling(int /*n1*/, int n2) {
  return {4, n2 > 1 ? 4 : 1};
}

/// (k1, k2) offsets expressed as multiples of (O1, O2).
struct BeamOffset {
  int k1Mult;
  int k2Mult;
  friend bool operator==(const BeamOffset&, const BeamOffset&) = default;
};

/// Table 5.2.2.2.1-3: mapping of i13 to (k1, k2) for 2-layer CSI reporting.
///   N1 > N2 > 1   : (0,0) (O1,0) (0,O2) (2O1,0)
///   N1 = N2       : (0,0) (O1,0) (0,O2) (O1,O2)
///   N1 = 2, N2 = 1: (0,0) (O1,0)
///   N1 > 2, N2 = 1: (0,0) (O1,0) (2O1,0) (3O1,0)
inline std::vector<BeamOffset> rank2Offsets(int n1, int n2) {
  if (n1 == 2 && n2 == 1) return {{0, 0}, {1, 0}};
  if (n1 > 2 && n2 == 1) return {{0, 0}, {1, 0}, {2, 0}, {3, 0}};
  if (n1 == n2) return {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
  if (n1 > n2 && n2 > 1) return {{0, 0}, {1, 0}, {0, 1}, {2, 0}};
  return {};
}

/// Table 5.2.2.2.1-4: mapping of i13 to (k1, k2) for 3-layer and 4-layer CSI
/// reporting when P_CSI-RS < 16.
///   N1 = 2, N2 = 1: (O1,0)
///   N1 = 4, N2 = 1: (O1,0) (2O1,0) (3O1,0)
///   N1 = 6, N2 = 1: (O1,0) (2O1,0) (3O1,0) (4O1,0)
///   N1 = 2, N2 = 2: (O1,0) (0,O2) (O1,O2)
///   N1 = 3, N2 = 2: (O1,0) (0,O2) (O1,O2) (2O1,0)
inline std::vector<BeamOffset> rank34Offsets(int n1, int n2) {
  if (n1 == 2 && n2 == 1) return {{1, 0}};
  if (n1 == 4 && n2 == 1) return {{1, 0}, {2, 0}, {3, 0}};
  if (n1 == 6 && n2 == 1) return {{1, 0}, {2, 0}, {3, 0}, {4, 0}};
  if (n1 == 2 && n2 == 2) return {{1, 0}, {0, 1}, {1, 1}};
  if (n1 == 3 && n2 == 2) return {{1, 0}, {0, 1}, {1, 1}, {2, 0}};
  return {};
}

/// Table 5.2.2.2.1-1 (two ports): number of codebook indices per layer count.
inline constexpr int kTwoPortRank1Count = 4;
inline constexpr int kTwoPortRank2Count = 2;

}  // namespace nrmimo::tables
