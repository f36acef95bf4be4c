#pragma once
// Umbrella header.

#include "wjn/strip.hpp"
#include "wjn/closed_form.hpp"
#include "wjn/piecewise.hpp"
#include "wjn/extremizer.hpp"
#include "wjn/oracle.hpp"
#include "wjn/verify.hpp"
#include "wjn/io.hpp"
