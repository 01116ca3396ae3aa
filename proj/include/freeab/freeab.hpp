#pragma once

#include "freeab/error.hpp"
#include "freeab/integer.hpp"
#include "freeab/matrix.hpp"
#include "freeab/linalg.hpp"
#include "freeab/primes.hpp"
#include "freeab/aut.hpp"
#include "freeab/word.hpp"
#include "freeab/certificate.hpp"
#include "freeab/serialize.hpp"
#include "freeab/classify.hpp"
#include "freeab/construct.hpp"
#include "freeab/ladder.hpp"
#include "freeab/filters.hpp"
