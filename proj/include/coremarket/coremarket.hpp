#ifndef COREMARKET_COREMARKET_HPP
#define COREMARKET_COREMARKET_HPP

#include "coremarket/allocation.hpp"
#include "coremarket/error.hpp"
#include "coremarket/hm_improve.hpp"
#include "coremarket/improvement.hpp"
#include "coremarket/io.hpp"
#include "coremarket/market.hpp"
#include "coremarket/oracle.hpp"
#include "coremarket/poset.hpp"
#include "coremarket/random.hpp"
#include "coremarket/reductions.hpp"
#include "coremarket/roommates.hpp"
#include "coremarket/ttc.hpp"

#endif  // COREMARKET_COREMARKET_HPP
