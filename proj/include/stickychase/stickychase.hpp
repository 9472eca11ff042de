#pragma once

#include "stickychase/atom.hpp"
#include "stickychase/chase.hpp"
#include "stickychase/classes.hpp"
#include "stickychase/graphs.hpp"
#include "stickychase/homomorphism.hpp"
#include "stickychase/instance.hpp"
#include "stickychase/magic.hpp"
#include "stickychase/parser.hpp"
#include "stickychase/program.hpp"
#include "stickychase/qa.hpp"
#include "stickychase/render.hpp"
#include "stickychase/rule.hpp"
#include "stickychase/term.hpp"
