#pragma once

#include "f0/audio_io.hpp"
#include "f0/baselines.hpp"
#include "f0/dsp.hpp"
#include "f0/error.hpp"
#include "f0/export.hpp"
#include "f0/fft.hpp"
#include "f0/pipeline.hpp"
#include "f0/synth.hpp"
#include "f0/track.hpp"
#include "f0/tracker.hpp"
