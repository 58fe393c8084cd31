#ifndef SCOREMIX_ERRORS_HPP
#define SCOREMIX_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace scoremix {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// odds
struct NonPositiveOdd : Error { using Error::Error; };
struct DegenerateOdds : Error { using Error::Error; };
struct InvalidRate : Error { using Error::Error; };
struct NoRoot : Error { using Error::Error; };

// skellam
struct InvalidSimplex : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };

// data
struct MalformedHeader : Error { using Error::Error; };
struct UnparseableRow : Error { using Error::Error; };
struct UnknownSeason : Error { using Error::Error; };
struct EmptyTrain : Error { using Error::Error; };
struct BadDatasetFile : Error { using Error::Error; };

// mcmc
struct NonFiniteStart : Error { using Error::Error; };
struct MissingDraws : Error { using Error::Error; };

// predict
struct UnknownTeam : Error { using Error::Error; };

// betting
struct LengthMismatch : Error { using Error::Error; };

}  // namespace scoremix

#endif
