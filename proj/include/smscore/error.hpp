#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Core>

namespace smscore {

// Every library failure derives from Error and names the module it came from.
class Error : public std::runtime_error {
public:
    Error(std::string module, std::string kind, const std::string& what)
        : std::runtime_error(what), module_(std::move(module)), kind_(std::move(kind)) {}

    const std::string& module() const noexcept { return module_; }
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string module_;
    std::string kind_;
};

#define SMSCORE_DEFINE_ERROR(Name, tag)                                    \
    class Name : public Error {                                            \
    public:                                                                \
        Name(std::string module, const std::string& what)                  \
            : Error(std::move(module), tag, what) {}                       \
    };

SMSCORE_DEFINE_ERROR(ConfigError, "config")
SMSCORE_DEFINE_ERROR(ShapeError, "shape")
SMSCORE_DEFINE_ERROR(DomainError, "domain")
SMSCORE_DEFINE_ERROR(FormatError, "format")
SMSCORE_DEFINE_ERROR(InsufficientDataError, "insufficient_data")
SMSCORE_DEFINE_ERROR(DegenerateDataError, "degenerate_data")
SMSCORE_DEFINE_ERROR(DegenerateVarianceError, "degenerate_variance")
SMSCORE_DEFINE_ERROR(BootstrapInstabilityError, "bootstrap_instability")
SMSCORE_DEFINE_ERROR(ExperimentError, "experiment")

#undef SMSCORE_DEFINE_ERROR

class IterationLimitError : public Error {
public:
    IterationLimitError(const std::string& what, Eigen::VectorXd last_iterate, double grad_norm)
        : Error("estimate", "iteration_limit", what),
          last_iterate_(std::move(last_iterate)),
          grad_norm_(grad_norm) {}

    const Eigen::VectorXd& last_iterate() const noexcept { return last_iterate_; }
    double grad_norm() const noexcept { return grad_norm_; }

private:
    Eigen::VectorXd last_iterate_;
    double grad_norm_;
};

class IllConditionedError : public Error {
public:
    IllConditionedError(const std::string& what, double condition_number)
        : Error("infer", "ill_conditioned", what), condition_number_(condition_number) {}

    double condition_number() const noexcept { return condition_number_; }

private:
    double condition_number_;
};

}  // namespace smscore
