#pragma once

#include "linalg.hpp"
#include "operators.hpp"
#include "semigroup.hpp"
#include "quadrature.hpp"
#include "resolvent.hpp"
#include "topology.hpp"
#include "trotter_kato.hpp"
#include "report.hpp"
#include "experiments.hpp"
