#pragma once

#include "mkdiv/distributions.hpp"
#include "mkdiv/error.hpp"
#include "mkdiv/functionals.hpp"
#include "mkdiv/generators.hpp"
#include "mkdiv/json_canonical.hpp"
#include "mkdiv/payoff.hpp"
#include "mkdiv/rng.hpp"
#include "mkdiv/robust.hpp"
#include "mkdiv/scores.hpp"
#include "mkdiv/spec.hpp"
#include "mkdiv/transport.hpp"
#include "mkdiv/verify.hpp"
