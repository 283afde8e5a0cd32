#pragma once

#include "vpl/algebra.hpp"
#include "vpl/automata.hpp"
#include "vpl/core.hpp"
#include "vpl/error.hpp"
#include "vpl/io.hpp"
#include "vpl/isomorphism.hpp"
#include "vpl/profinite.hpp"
#include "vpl/transformation.hpp"
#include "vpl/translate.hpp"
