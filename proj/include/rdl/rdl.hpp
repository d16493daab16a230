#pragma once

#include "rdl/bounds.hpp"
#include "rdl/channel_io.hpp"
#include "rdl/channels.hpp"
#include "rdl/complex_vec.hpp"
#include "rdl/errors.hpp"
#include "rdl/estimation.hpp"
#include "rdl/exports.hpp"
#include "rdl/fourier.hpp"
#include "rdl/game.hpp"
#include "rdl/measurement.hpp"
#include "rdl/noise.hpp"
#include "rdl/outcome_io.hpp"
#include "rdl/parallel.hpp"
#include "rdl/random.hpp"
#include "rdl/special.hpp"
#include "rdl/table.hpp"
