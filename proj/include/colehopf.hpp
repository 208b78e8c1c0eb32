#ifndef COLEHOPF_HPP
#define COLEHOPF_HPP

#include "colehopf/calculus.hpp"
#include "colehopf/catalog.hpp"
#include "colehopf/coeff.hpp"
#include "colehopf/errors.hpp"
#include "colehopf/eval.hpp"
#include "colehopf/expr.hpp"
#include "colehopf/jet.hpp"
#include "colehopf/ode.hpp"
#include "colehopf/pairing.hpp"
#include "colehopf/parse.hpp"
#include "colehopf/problem_file.hpp"
#include "colehopf/riccati.hpp"
#include "colehopf/verify.hpp"

#endif  // COLEHOPF_HPP
