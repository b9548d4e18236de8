#pragma once

#include <stdexcept>
#include <string>

namespace lfm {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// linear_model
struct ZeroEigenvalue : Error { using Error::Error; };
struct AllCoordinatesZero : Error { using Error::Error; };
struct PointOutsideChart : Error { using Error::Error; };

// hyperbolic
struct ShapeUnavailable : Error { using Error::Error; };

// cells
struct MalformedIndex : Error { using Error::Error; };
struct NoSmallSolution : Error { using Error::Error; };

// bowen
struct PreconditionViolated : Error { using Error::Error; };
struct ConditionUnmet : Error {
    ConditionUnmet(std::string msg, int coord, std::string clause)
        : Error(std::move(msg)), coordinate(coord), clause(std::move(clause)) {}
    int coordinate;
    std::string clause;
};
struct PathLeavesChart : Error { using Error::Error; };
struct PairTooCloseToHyperplane : Error { using Error::Error; };

// projections
struct ZeroCoordinate : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct LeftPlaque : Error { using Error::Error; };
struct BranchAmbiguity : Error { using Error::Error; };
struct DegenerateDerivative : Error { using Error::Error; };
struct ChainBroken : Error {
    ChainBroken(std::string msg, int step_index) : Error(std::move(msg)), step(step_index) {}
    int step;
};

// covering
struct NotACovering : Error {
    NotACovering(std::string msg, int covering_index) : Error(std::move(msg)), index(covering_index) {}
    int index;
};
struct BadSectorAssignment : Error { using Error::Error; };
struct WindingCheckFailed : Error { using Error::Error; };
struct OracleFailure : Error { using Error::Error; };

// cli
struct ConfigInvalid : Error { using Error::Error; };
struct UnknownSelector : Error { using Error::Error; };

} // namespace lfm
