#ifndef CARNOT_CARNOT_HPP
#define CARNOT_CARNOT_HPP

#include "carnot/errors.hpp"
#include "carnot/group.hpp"
#include "carnot/grid.hpp"
#include "carnot/io.hpp"
#include "carnot/spectral.hpp"
#include "carnot/wavelet.hpp"
#include "carnot/besov.hpp"
#include "carnot/frames.hpp"
#include "carnot/families.hpp"

#endif
