#pragma once

#include "anisofem/best_approx.hpp"
#include "anisofem/families.hpp"
#include "anisofem/fields.hpp"
#include "anisofem/finite_element.hpp"
#include "anisofem/mesh.hpp"
#include "anisofem/raviart_thomas.hpp"
#include "anisofem/report.hpp"
#include "anisofem/selftest.hpp"
#include "anisofem/shape_metrics.hpp"
