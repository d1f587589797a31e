#pragma once

#include <stdexcept>
#include <string>

namespace templab {

// Base class for all library errors. `code()` is the machine-readable tag
// used in error records emitted by the CLI.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

#define TEMPLAB_DEFINE_ERROR(Name, tag)                                  \
    class Name : public Error {                                          \
    public:                                                              \
        explicit Name(const std::string& what) : Error(tag, what) {}     \
    }

// system-core
TEMPLAB_DEFINE_ERROR(DegenerateSpectrum, "degenerate_spectrum");
TEMPLAB_DEFINE_ERROR(NonReal, "non_real_spectrum");
TEMPLAB_DEFINE_ERROR(CommutationViolation, "commutation_violation");
TEMPLAB_DEFINE_ERROR(OutOfDomain, "out_of_domain");

// viscous-solver
TEMPLAB_DEFINE_ERROR(DomainExit, "domain_exit");
TEMPLAB_DEFINE_ERROR(Instability, "instability");
TEMPLAB_DEFINE_ERROR(InsufficientRecords, "insufficient_records");
TEMPLAB_DEFINE_ERROR(NonPositiveViscosity, "non_positive_viscosity");

// riemann-semigroup
TEMPLAB_DEFINE_ERROR(NoConvergence, "no_convergence");
TEMPLAB_DEFINE_ERROR(SectorOverlap, "sector_overlap");
TEMPLAB_DEFINE_ERROR(DegenerateFlux, "degenerate_flux");
TEMPLAB_DEFINE_ERROR(InteractionReached, "interaction_reached");
TEMPLAB_DEFINE_ERROR(FrontBudgetExceeded, "front_budget_exceeded");

// estimates-lab
TEMPLAB_DEFINE_ERROR(GridMismatch, "grid_mismatch");
TEMPLAB_DEFINE_ERROR(SpeedGapViolated, "speed_gap_violated");
TEMPLAB_DEFINE_ERROR(NoReference, "no_reference");

// cli / config
TEMPLAB_DEFINE_ERROR(ConfigError, "config_error");
TEMPLAB_DEFINE_ERROR(ParseError, "parse_error");

#undef TEMPLAB_DEFINE_ERROR

} // namespace templab
