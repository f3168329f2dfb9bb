#include "tdl/errors.hpp"

#include <utility>

namespace tdl {

Error::Error(std::string category, const std::string& message)
    : std::runtime_error(message), category_(std::move(category))
{
}

AccuracyError::AccuracyError(const std::string& message, std::complex<double> estimate,
                             double error_bound)
    : Error("accuracy", message), estimate_(estimate), error_bound_(error_bound)
{
}

ConditioningError::ConditioningError(const std::string& message, double min_eigenvalue)
    : Error("conditioning", message), min_eigenvalue_(min_eigenvalue)
{
}

} // namespace tdl
