#pragma once

#include "nehari/action.hpp"
#include "nehari/assembly.hpp"
#include "nehari/config.hpp"
#include "nehari/errors.hpp"
#include "nehari/exhaustion.hpp"
#include "nehari/forcing.hpp"
#include "nehari/grid_function.hpp"
#include "nehari/hypotheses.hpp"
#include "nehari/output.hpp"
#include "nehari/parallel.hpp"
#include "nehari/partition.hpp"
#include "nehari/quadrature.hpp"
#include "nehari/reaction.hpp"
#include "nehari/shooting.hpp"
#include "nehari/signed_minimizer.hpp"
#include "nehari/subharmonic.hpp"
#include "nehari/tridiag.hpp"
#include "nehari/verify.hpp"
#include "nehari/version.hpp"
