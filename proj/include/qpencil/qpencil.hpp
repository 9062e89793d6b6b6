#pragma once

#include "qpencil/bounds.hpp"
#include "qpencil/detmethod.hpp"
#include "qpencil/errors.hpp"
#include "qpencil/integers.hpp"
#include "qpencil/io.hpp"
#include "qpencil/matrix.hpp"
#include "qpencil/pencil.hpp"
#include "qpencil/points.hpp"
#include "qpencil/search.hpp"
