#pragma once

// Hyperspectral video tracking with random 3D convolutional features and a
// multichannel kernelized correlation filter, plus the synthetic-sequence and
// precision-evaluation tooling around it.

#include "hstrack/bench.hpp"
#include "hstrack/convfeat.hpp"
#include "hstrack/cube.hpp"
#include "hstrack/cube_io.hpp"
#include "hstrack/dft.hpp"
#include "hstrack/kcf.hpp"
#include "hstrack/synth.hpp"
#include "hstrack/tracker.hpp"
#include "hstrack/types.hpp"
