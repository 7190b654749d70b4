/**
 * @file mcs_table.hpp
 * @brief PDSCH MCS index table 2 (3GPP TS 38.214 Table 5.1.3.1-2, up to
 * 256QAM), spectral efficiency column, indices 0..27. Entries 28..31 are
 * reserved in the standard and not listed.
 */
#pragma once

#include <array>

namespace nrmimo::tables {

inline constexpr int kNumMcs = 28;

// bits per resource element, index == MCS
inline constexpr std::array<double, kNumMcs> kMcsTable2Se = {
    0.2344, 0.3770, 0.6016, 0.8770, 1.1758,  // QPSK
    1.4766, 1.6953, 1.9141, 2.1602, 2.4063, 2.5703,  // 16QAM
    2.7305, 3.0293, 3.3223, 3.6094, 3.9023, 4.2129, 4.5234, 4.8164, 5.1152,  // 64QAM
    5.3320, 5.5547, 5.8906, 6.2266, 6.5703, 6.9141, 7.1602, 7.4063,  // 256QAM
};

}  // namespace nrmimo::tables
