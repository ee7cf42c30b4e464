#pragma once

#include <stdexcept>
#include <string>

namespace rofigs {

// Single exception type for all data/config/model errors. Messages are
// user-facing and name the offending row/column/fold where applicable.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rofigs
