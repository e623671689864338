#pragma once

#include "zerosum/errors.hpp"
#include "zerosum/group.hpp"
#include "zerosum/io.hpp"
#include "zerosum/search.hpp"
#include "zerosum/sequence.hpp"
#include "zerosum/structure.hpp"
#include "zerosum/verification.hpp"
