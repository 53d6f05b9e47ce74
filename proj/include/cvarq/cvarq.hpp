#ifndef CVARQ_CVARQ_HPP
#define CVARQ_CVARQ_HPP

#include "cvarq/arq.hpp"
#include "cvarq/channel.hpp"
#include "cvarq/goodput.hpp"
#include "cvarq/harq.hpp"
#include "cvarq/outage.hpp"
#include "cvarq/sim.hpp"
#include "cvarq/special.hpp"

#endif  // CVARQ_CVARQ_HPP
