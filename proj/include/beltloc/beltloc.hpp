#pragma once

// Umbrella header for the belt sound-source localization library.

#include "beltloc/calibration.hpp"
#include "beltloc/clip.hpp"
#include "beltloc/common.hpp"
#include "beltloc/config.hpp"
#include "beltloc/evaluation.hpp"
#include "beltloc/fft.hpp"
#include "beltloc/geometry.hpp"
#include "beltloc/localization.hpp"
#include "beltloc/manifest.hpp"
#include "beltloc/masking.hpp"
#include "beltloc/profile_io.hpp"
#include "beltloc/report.hpp"
#include "beltloc/simulate.hpp"
#include "beltloc/stft.hpp"
#include "beltloc/tdoa.hpp"
#include "beltloc/truth_io.hpp"
#include "beltloc/version.hpp"
#include "beltloc/wav.hpp"
