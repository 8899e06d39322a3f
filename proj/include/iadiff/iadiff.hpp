#pragma once

// Umbrella header for the iadiff library: multiscale integrodifferential
// anisotropic diffusion denoising with its PM, EED and IID ablations, a
// derivative-free training harness, and PGM/PFM image I/O.

#include "iadiff/diffusion.hpp"
#include "iadiff/errors.hpp"
#include "iadiff/gaussian.hpp"
#include "iadiff/image.hpp"
#include "iadiff/image_io.hpp"
#include "iadiff/optim.hpp"
#include "iadiff/parallel.hpp"
#include "iadiff/params_io.hpp"
#include "iadiff/scales.hpp"
#include "iadiff/stencil.hpp"
#include "iadiff/tensor.hpp"
#include "iadiff/training.hpp"
