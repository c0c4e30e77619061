#pragma once

#include <paneldep/cd_tests.hpp>
#include <paneldep/config.hpp>
#include <paneldep/corr.hpp>
#include <paneldep/csv.hpp>
#include <paneldep/dgp.hpp>
#include <paneldep/distributions.hpp>
#include <paneldep/errors.hpp>
#include <paneldep/montecarlo.hpp>
#include <paneldep/panel.hpp>
#include <paneldep/report.hpp>
#include <paneldep/rng.hpp>
