#ifndef MDSENSE_MDSENSE_HPP
#define MDSENSE_MDSENSE_HPP

#include "mdsense/baselines.hpp"
#include "mdsense/config.hpp"
#include "mdsense/env.hpp"
#include "mdsense/harness.hpp"
#include "mdsense/nn.hpp"
#include "mdsense/ppo.hpp"
#include "mdsense/recovery.hpp"
#include "mdsense/signal.hpp"
#include "mdsense/synth.hpp"
#include "mdsense/traffic.hpp"

#endif  // MDSENSE_MDSENSE_HPP
