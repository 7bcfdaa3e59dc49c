#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace phwc {

enum class ErrorKind {
    OutOfChart,
    DegenerateMetric,
    DifferentiationFailure,
    NonFiniteIntegrand,
    RankDeficient,
    NotPHWC,
    IsotropyFailure,
    ComplexChartMissing,
    NotSemiconformal,
    DimensionTooSmall,
    EigenframeDegenerate,
    NotCritical,
    NotSasakianScenario,
    UnknownScenario,
    ConfigError,
    InvalidArgument,
};

std::string_view to_string(ErrorKind kind);

class GeometryError : public std::runtime_error {
public:
    GeometryError(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace phwc
