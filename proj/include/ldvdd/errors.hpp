#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ldvdd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid input data: bad labels, out-of-range periods, negative outcomes
/// for a nonnegative family, malformed files.
class DataError : public Error {
public:
    using Error::Error;
};

/// The design matrix is not of full column rank on the weighted support.
class SingularDesignError : public Error {
public:
    SingularDesignError(std::vector<std::string> columns)
        : Error(make_message(columns)), columns_(std::move(columns)) {}

    const std::vector<std::string>& columns() const noexcept { return columns_; }

private:
    static std::string make_message(const std::vector<std::string>& columns) {
        std::string msg = "singular design: linearly dependent column(s)";
        for (std::size_t i = 0; i < columns.size(); ++i) {
            msg += (i == 0 ? " " : ", ");
            msg += columns[i];
        }
        return msg;
    }

    std::vector<std::string> columns_;
};

class SingularHessianError : public Error {
public:
    using Error::Error;
};

/// A linear predictor sits beyond the exp() cap at the reported optimum, so
/// the estimate cannot be trusted.
class OverflowGuardError : public Error {
public:
    using Error::Error;
};

/// Logistic-type fit diverging under (quasi-)complete separation.
class SeparationError : public Error {
public:
    using Error::Error;
};

/// Empty or zero-mean cell in a nonparametric ratio.
class EmptyCellError : public Error {
public:
    using Error::Error;
};

/// The Lin-DD transform ln(b/ybar + 1) is undefined for this sample; the
/// Monte Carlo driver redraws the replication.
class RedrawRequired : public Error {
public:
    using Error::Error;
};

}  // namespace ldvdd
