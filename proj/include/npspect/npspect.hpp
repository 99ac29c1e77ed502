#pragma once

#include "npspect/assembly.hpp"
#include "npspect/config.hpp"
#include "npspect/core.hpp"
#include "npspect/eigensolve.hpp"
#include "npspect/geometry.hpp"
#include "npspect/kernels.hpp"
#include "npspect/material.hpp"
#include "npspect/oracle.hpp"
#include "npspect/planar.hpp"
#include "npspect/report.hpp"
#include "npspect/spectral.hpp"
#include "npspect/symbol.hpp"
#include "npspect/verify.hpp"
