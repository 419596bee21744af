#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "edmeta/distributions.hpp"

namespace edmeta {

// Relative latent model complexity (1/k) sum tau^2 / (tau^2 + sigma_i^2).
// Throws DataError for empty or non-positive sigmas.
double rlmc(double tau, std::span<const double> sigmas);

// tau^2 / (tau^2 + s^2) with s the geometric mean of the sigmas.
double rlmc_reference(double tau, std::span<const double> sigmas);

enum class RlmcFunctional {
  StudyAverage,        // rlmc()
  GeometricReference,  // rlmc_reference(); reproduces the published HN scale grid
};

double rlmc_value(RlmcFunctional f, double tau, std::span<const double> sigmas);

// The functional evaluated at the prior median of tau ~ family(scale).
double rlmc_at_median(double scale, std::span<const double> sigmas, Family family,
                      RlmcFunctional f = RlmcFunctional::GeometricReference);

// Prior scale whose median induces `target`; bracketing root finder to
// 1e-8 on the RLMC scale. family must be HalfNormal or HalfCauchy.
double solve_scale(double target, std::span<const double> sigmas, Family family,
                   RlmcFunctional f = RlmcFunctional::GeometricReference);

struct RlmcGrid {
  std::vector<double> targets;
  std::vector<double> solved_scales;
  Family prior_family = Family::HalfNormal;
  RlmcFunctional functional = RlmcFunctional::GeometricReference;
  std::vector<double> sigmas;
};

RlmcGrid solve_grid(const std::vector<double>& targets, std::span<const double> sigmas,
                    Family family, RlmcFunctional f = RlmcFunctional::GeometricReference);

// CSV `target,scale`.
void write_grid_csv(std::ostream& out, const RlmcGrid& grid);

}  // namespace edmeta
