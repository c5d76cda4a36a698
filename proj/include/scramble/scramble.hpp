#pragma once

#include "scramble/betashift.hpp"
#include "scramble/birkhoff.hpp"
#include "scramble/chaos.hpp"
#include "scramble/errors.hpp"
#include "scramble/measures.hpp"
#include "scramble/point.hpp"
#include "scramble/rational.hpp"
#include "scramble/recurrence.hpp"
#include "scramble/shiftspace.hpp"
#include "scramble/specification.hpp"
#include "scramble/word.hpp"
