#ifndef AGEBAYES_ERROR_HPP
#define AGEBAYES_ERROR_HPP

#include <stdexcept>
#include <string>

namespace agebayes {

// Exit-code categories used by the command-line front end:
// usage 1, data 2, model/convergence 3.

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace agebayes

#endif
