#pragma once

#include "blab/config.hpp"
#include "blab/duhamel.hpp"
#include "blab/errors.hpp"
#include "blab/experiments.hpp"
#include "blab/fock.hpp"
#include "blab/hamiltonians.hpp"
#include "blab/integrator.hpp"
#include "blab/lattice.hpp"
#include "blab/meanfield.hpp"
#include "blab/model.hpp"
#include "blab/operators.hpp"
#include "blab/projections.hpp"
#include "blab/propagation.hpp"
#include "blab/random.hpp"
#include "blab/snapshot.hpp"
#include "blab/state.hpp"
#include "blab/tensor.hpp"

namespace blab {

inline constexpr const char* version = "1.0.0";
inline constexpr const char* snapshot_format = "BLAB1";

}  // namespace blab
