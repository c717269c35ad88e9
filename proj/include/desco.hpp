#pragma once

#include "desco/types.hpp"
#include "desco/gf.hpp"
#include "desco/linalg.hpp"
#include "desco/bebc.hpp"
#include "desco/stream.hpp"
#include "desco/diagonal.hpp"
#include "desco/engine.hpp"
#include "desco/sco.hpp"
#include "desco/channel.hpp"
#include "desco/de_sco.hpp"
#include "desco/oracle.hpp"
#include "desco/serialize.hpp"
#include "desco/sim.hpp"
