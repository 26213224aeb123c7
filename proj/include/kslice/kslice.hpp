#pragma once

#include "kslice/braid.hpp"
#include "kslice/error.hpp"
#include "kslice/framed_state.hpp"
#include "kslice/gf2.hpp"
#include "kslice/invariants.hpp"
#include "kslice/laurent.hpp"
#include "kslice/matrix.hpp"
#include "kslice/script.hpp"
#include "kslice/serialize.hpp"
#include "kslice/service.hpp"
#include "kslice/session.hpp"
#include "kslice/signature.hpp"
