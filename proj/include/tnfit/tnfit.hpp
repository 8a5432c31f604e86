#ifndef TNFIT_TNFIT_HPP
#define TNFIT_TNFIT_HPP

#include "tnfit/error.hpp"
#include "tnfit/estimator.hpp"
#include "tnfit/model.hpp"
#include "tnfit/quadrature.hpp"
#include "tnfit/sample_moments.hpp"
#include "tnfit/synth.hpp"

#endif  // TNFIT_TNFIT_HPP
