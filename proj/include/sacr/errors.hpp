#ifndef SACR_ERRORS_HPP
#define SACR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sacr {

// Exit-code contract used by the CLI: 2 usage, 3 data, 4 numerical.
enum class ErrorKind { usage = 2, data = 3, numeric = 4 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const { return kind_; }
    int exit_code() const { return static_cast<int>(kind_); }

private:
    ErrorKind kind_;
};

#define SACR_DEFINE_ERROR(name, kind)                      \
    class name : public Error {                            \
    public:                                                \
        explicit name(const std::string& msg)              \
            : Error(ErrorKind::kind, std::string(#name) + ": " + msg) {} \
    }

// linear algebra / solver
SACR_DEFINE_ERROR(NotPositiveDefinite, numeric);
SACR_DEFINE_ERROR(GridTooShort, numeric);
SACR_DEFINE_ERROR(DimensionMismatch, numeric);
SACR_DEFINE_ERROR(InvalidProblem, numeric);
SACR_DEFINE_ERROR(Infeasible, numeric);
SACR_DEFINE_ERROR(InvalidMultipliers, numeric);
SACR_DEFINE_ERROR(SolverError, numeric);
SACR_DEFINE_ERROR(NonConvergence, numeric);
SACR_DEFINE_ERROR(AllWeightsInfinite, numeric);
SACR_DEFINE_ERROR(InvalidArgument, numeric);

// data handling
SACR_DEFINE_ERROR(ParseError, data);
SACR_DEFINE_ERROR(RaggedRows, data);
SACR_DEFINE_ERROR(NonBinaryLabels, data);
SACR_DEFINE_ERROR(OutsideKnotRange, data);
SACR_DEFINE_ERROR(GridMismatch, data);
SACR_DEFINE_ERROR(MissingStandardization, data);
SACR_DEFINE_ERROR(BothClassesRequired, data);
SACR_DEFINE_ERROR(LengthMismatch, data);
SACR_DEFINE_ERROR(KTooLarge, data);
SACR_DEFINE_ERROR(IoError, data);

#undef SACR_DEFINE_ERROR

} // namespace sacr

#endif
