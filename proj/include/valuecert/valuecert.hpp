#pragma once

#include "valuecert/error.hpp"
#include "valuecert/expr.hpp"
#include "valuecert/problem.hpp"
#include "valuecert/pareto.hpp"
#include "valuecert/geoffrion.hpp"
#include "valuecert/linprog.hpp"
#include "valuecert/support.hpp"
#include "valuecert/kkt.hpp"
#include "valuecert/analysis.hpp"
