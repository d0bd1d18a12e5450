#pragma once

#include "qlat/droplet.hpp"
#include "qlat/eigensolve.hpp"
#include "qlat/errors.hpp"
#include "qlat/falicov_kimball.hpp"
#include "qlat/hilbert.hpp"
#include "qlat/interface_probe.hpp"
#include "qlat/io.hpp"
#include "qlat/lattice.hpp"
#include "qlat/sparse.hpp"
#include "qlat/xxz.hpp"
