#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace featdyn {

/// Neuron weights are stored one neuron per row.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class ShapeError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class FormatError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace featdyn
