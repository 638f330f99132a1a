#ifndef COGRATE_COGRATE_HPP
#define COGRATE_COGRATE_HPP

#include "cograte/numerics.hpp"
#include "cograte/rng.hpp"
#include "cograte/sensing.hpp"
#include "cograte/fbcode.hpp"
#include "cograte/markov8.hpp"
#include "cograte/optimize.hpp"
#include "cograte/effrate.hpp"
#include "cograte/queuesim.hpp"
#include "cograte/config.hpp"
#include "cograte/cli.hpp"

#endif  // COGRATE_COGRATE_HPP
