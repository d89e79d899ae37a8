#pragma once

#include <stdexcept>
#include <string>

namespace latentgeo {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-finite values, dimension mismatches, out-of-range arguments.
struct InvalidInput : Error { using Error::Error; };

// t outside the curve parameter domain [0,1].
struct DomainError : Error { using Error::Error; };

// Eigenvalue below the PSD tolerance where a metric was expected.
struct NotPositiveDefinite : Error { using Error::Error; };

// lambda_min <= 0 where a condition number / PD metric was required.
struct SingularMetric : Error { using Error::Error; };

// Malformed file content (syntax level), with position context.
struct ParseError : Error { using Error::Error; };

// File parsed but violates the schema (e.g. layer dims do not chain).
struct ValidationError : Error { using Error::Error; };

// IDX magic number mismatch.
struct FormatError : Error { using Error::Error; };

// IDX image/label counts disagree.
struct ConsistencyError : Error { using Error::Error; };

struct EmptyDataset : Error { using Error::Error; };

// Non-finite loss, single-class input, and similar trainer failures.
struct TrainingError : Error { using Error::Error; };

// exact_vjp gradients requested for a metric variant that has none.
struct UnsupportedMode : Error { using Error::Error; };

struct DegenerateEndpoints : Error { using Error::Error; };

// Monte-Carlo run exceeded the per-sample failure budget.
struct RunError : Error { using Error::Error; };

} // namespace latentgeo
