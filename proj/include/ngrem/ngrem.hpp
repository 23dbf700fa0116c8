#pragma once

#include "ngrem/subset.hpp"
#include "ngrem/error.hpp"
#include "ngrem/rational.hpp"
#include "ngrem/model.hpp"
#include "ngrem/model_io.hpp"
#include "ngrem/chain.hpp"
#include "ngrem/free_energy.hpp"
#include "ngrem/sizes.hpp"
#include "ngrem/variational.hpp"
#include "ngrem/simulator.hpp"
#include "ngrem/report.hpp"
