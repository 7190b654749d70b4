/**
 * @file nrmimo.hpp
 * @brief Umbrella header.
 */
#pragma once

#include "nrmimo/antenna.hpp"
#include "nrmimo/campaign.hpp"
#include "nrmimo/channel.hpp"
#include "nrmimo/codebook.hpp"
#include "nrmimo/codebook_tables.hpp"
#include "nrmimo/link_abstraction.hpp"
#include "nrmimo/matrix_array.hpp"
#include "nrmimo/mcs_table.hpp"
#include "nrmimo/mimo_sinr.hpp"
#include "nrmimo/pm_search.hpp"
#include "nrmimo/random.hpp"
#include "nrmimo/scenario.hpp"
#include "nrmimo/simulator.hpp"
#include "nrmimo/stats.hpp"
