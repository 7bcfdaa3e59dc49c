#include "phwc/errors.hpp"

namespace phwc {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::OutOfChart: return "OutOfChart";
        case ErrorKind::DegenerateMetric: return "DegenerateMetric";
        case ErrorKind::DifferentiationFailure: return "DifferentiationFailure";
        case ErrorKind::NonFiniteIntegrand: return "NonFiniteIntegrand";
        case ErrorKind::RankDeficient: return "RankDeficient";
        case ErrorKind::NotPHWC: return "NotPHWC";
        case ErrorKind::IsotropyFailure: return "IsotropyFailure";
        case ErrorKind::ComplexChartMissing: return "ComplexChartMissing";
        case ErrorKind::NotSemiconformal: return "NotSemiconformal";
        case ErrorKind::DimensionTooSmall: return "DimensionTooSmall";
        case ErrorKind::EigenframeDegenerate: return "EigenframeDegenerate";
        case ErrorKind::NotCritical: return "NotCritical";
        case ErrorKind::NotSasakianScenario: return "NotSasakianScenario";
        case ErrorKind::UnknownScenario: return "UnknownScenario";
        case ErrorKind::ConfigError: return "ConfigError";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

}  // namespace phwc
