#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace warpbench {

//! Error categories, chosen so the CLI can map exceptions to exit codes:
//! config errors -> 4, unmet hypotheses -> 2, failed numeric assertions -> 3.
enum class ErrorKind { config = 4, hypothesis = 2, assertion = 3 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string name, const std::string& what)
        : std::runtime_error(name + ": " + what), kind_(kind), name_(std::move(name)) {}
    ErrorKind kind() const noexcept { return kind_; }
    const std::string& name() const noexcept { return name_; }

private:
    ErrorKind kind_;
    std::string name_;
};

#define WARPBENCH_ERROR(Name, Kind)                       \
    struct Name : Error {                                 \
        explicit Name(const std::string& what)            \
            : Error(ErrorKind::Kind, #Name, what) {}      \
    }

// input / precondition problems
WARPBENCH_ERROR(ConfigError, config);
WARPBENCH_ERROR(BadParameters, config);
WARPBENCH_ERROR(DimensionTooLow, config);
WARPBENCH_ERROR(PoleConditionViolated, config);
WARPBENCH_ERROR(NonPositiveWarp, config);
WARPBENCH_ERROR(PoleEvaluation, config);
WARPBENCH_ERROR(OutOfGrid, config);
WARPBENCH_ERROR(MeshTooCoarse, config);
WARPBENCH_ERROR(BallExitsGrid, config);
WARPBENCH_ERROR(OutsideU, config);
WARPBENCH_ERROR(HorizonTooSmall, config);
WARPBENCH_ERROR(RadiusTooLarge, config);
WARPBENCH_ERROR(AlphaTooSmall, config);
WARPBENCH_ERROR(KZero, config);
WARPBENCH_ERROR(NotNormalized, config);
WARPBENCH_ERROR(DegenerateH, config);

// geometric hypotheses that the given manifold fails to satisfy
WARPBENCH_ERROR(Parabolic, hypothesis);
WARPBENCH_ERROR(Divergent, hypothesis);
WARPBENCH_ERROR(NotGaugeable, hypothesis);
WARPBENCH_ERROR(EnvelopeDivergent, hypothesis);
WARPBENCH_ERROR(AVRUndefined, hypothesis);
WARPBENCH_ERROR(TailUnresolved, hypothesis);
WARPBENCH_ERROR(CurvatureHypothesisFails, hypothesis);

// numeric assertions that should have held
WARPBENCH_ERROR(FitFailed, assertion);
WARPBENCH_ERROR(NoConvergence, assertion);
WARPBENCH_ERROR(DominanceFailure, assertion);
WARPBENCH_ERROR(CheckFailed, assertion);

#undef WARPBENCH_ERROR

}  // namespace warpbench
