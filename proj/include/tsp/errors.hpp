#pragma once

#include <stdexcept>
#include <string>

namespace tsp {

/// Broad failure class, used by the CLI to pick an exit status.
enum class ErrorKind { Config = 1, Data = 2, Numerical = 3 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string code, const std::string& what)
        : std::runtime_error(what), kind_(kind), code_(std::move(code)) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& code() const noexcept { return code_; }

private:
    ErrorKind kind_;
    std::string code_;
};

#define TSP_DEFINE_ERROR(Name, Kind)                                        \
    class Name : public Error {                                             \
    public:                                                                 \
        explicit Name(const std::string& what) : Error(Kind, #Name, what) {} \
    }

TSP_DEFINE_ERROR(ConfigError, ErrorKind::Config);
TSP_DEFINE_ERROR(IoError, ErrorKind::Data);
TSP_DEFINE_ERROR(ParseError, ErrorKind::Data);
TSP_DEFINE_ERROR(InclusionViolation, ErrorKind::Data);
TSP_DEFINE_ERROR(IndexOutOfRange, ErrorKind::Data);
TSP_DEFINE_ERROR(DimensionMismatch, ErrorKind::Data);
TSP_DEFINE_ERROR(ZeroVariance, ErrorKind::Data);
TSP_DEFINE_ERROR(EmptyInput, ErrorKind::Data);
TSP_DEFINE_ERROR(ZeroSubspace, ErrorKind::Data);
TSP_DEFINE_ERROR(EigenFailure, ErrorKind::Numerical);
TSP_DEFINE_ERROR(DegenerateCovariance, ErrorKind::Numerical);
TSP_DEFINE_ERROR(SolverFailure, ErrorKind::Numerical);

#undef TSP_DEFINE_ERROR

}  // namespace tsp
