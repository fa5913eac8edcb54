#ifndef LAXFLOW_LAXFLOW_HPP
#define LAXFLOW_LAXFLOW_HPP

#include "laxflow/config.hpp"
#include "laxflow/dense_matrix.hpp"
#include "laxflow/dynamics.hpp"
#include "laxflow/errors.hpp"
#include "laxflow/exact.hpp"
#include "laxflow/invariants.hpp"
#include "laxflow/io.hpp"
#include "laxflow/lax.hpp"
#include "laxflow/model.hpp"
#include "laxflow/random_state.hpp"
#include "laxflow/trajectory.hpp"

#endif  // LAXFLOW_LAXFLOW_HPP
