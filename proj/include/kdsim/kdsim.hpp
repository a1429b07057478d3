#ifndef KDSIM_KDSIM_HPP
#define KDSIM_KDSIM_HPP

#include "kdsim/beams.hpp"
#include "kdsim/config_io.hpp"
#include "kdsim/constants.hpp"
#include "kdsim/diagnostics.hpp"
#include "kdsim/errors.hpp"
#include "kdsim/fft.hpp"
#include "kdsim/harness/formats.hpp"
#include "kdsim/harness/runner.hpp"
#include "kdsim/harness/scenario.hpp"
#include "kdsim/harness/sweep.hpp"
#include "kdsim/maxwell.hpp"
#include "kdsim/model.hpp"
#include "kdsim/tdse.hpp"
#include "kdsim/volkov.hpp"

#endif
