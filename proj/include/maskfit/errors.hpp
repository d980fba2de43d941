#pragma once

#include <stdexcept>
#include <string>

namespace maskfit {

// Error classes map to process exit codes in the CLI:
//   Parse -> 2, Degenerate -> 3, Convergence -> 4.
enum class ErrorKind { Parse, Degenerate, Convergence, Logic };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

#define MASKFIT_DEFINE_ERROR(Name, Kind)                                       \
    class Name : public Error {                                                \
    public:                                                                    \
        explicit Name(const std::string& msg) : Error(ErrorKind::Kind, msg) {} \
    }

MASKFIT_DEFINE_ERROR(ParseError, Parse);
MASKFIT_DEFINE_ERROR(MissingIntrinsics, Parse);
MASKFIT_DEFINE_ERROR(UnsupportedFeature, Parse);

MASKFIT_DEFINE_ERROR(ZeroAreaFace, Degenerate);
MASKFIT_DEFINE_ERROR(NonManifoldEdge, Degenerate);
MASKFIT_DEFINE_ERROR(EmptyPointSet, Degenerate);
MASKFIT_DEFINE_ERROR(TooFewLandmarks, Degenerate);
MASKFIT_DEFINE_ERROR(DegenerateScale, Degenerate);
MASKFIT_DEFINE_ERROR(DegenerateConfiguration, Degenerate);
MASKFIT_DEFINE_ERROR(AllPairsPruned, Degenerate);
MASKFIT_DEFINE_ERROR(SingularSystem, Degenerate);
MASKFIT_DEFINE_ERROR(InvalidRegionIndex, Degenerate);
MASKFIT_DEFINE_ERROR(MapOutOfRange, Degenerate);
MASKFIT_DEFINE_ERROR(OutOfDomain, Degenerate);
MASKFIT_DEFINE_ERROR(UndefinedCV, Degenerate);
MASKFIT_DEFINE_ERROR(InvalidArgument, Degenerate);

MASKFIT_DEFINE_ERROR(ConvergenceFailure, Convergence);

#undef MASKFIT_DEFINE_ERROR

inline int exit_code_for(const Error& e) {
    switch (e.kind()) {
    case ErrorKind::Parse: return 2;
    case ErrorKind::Degenerate: return 3;
    case ErrorKind::Convergence: return 4;
    default: return 1;
    }
}

} // namespace maskfit
