// Copyright 2026 The qsd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qsd {

using Complex = std::complex<double>;
using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Error hierarchy. Everything thrown by the library derives from qsd::Error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Raised when a precondition on the numerical data fails (non-PSD Gram,
// non-normalized state, non-Hermitian block, NaN input, ...).
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

// Dual and heuristic programs are only defined for finite rewards.
class MaskedDualError : public Error {
 public:
  using Error::Error;
};

struct PsdCheck {
  bool is_psd = false;
  double min_eigenvalue = 0.0;
};

/// Minimum eigenvalue of the Hermitian part of a square matrix, and whether it
/// clears -tol.
PsdCheck check_psd(const MatrixXd& m, double tol);
PsdCheck check_psd(const MatrixXc& m, double tol);

/// Largest entrywise deviation from Hermitian symmetry.
double hermitian_defect(const MatrixXc& m);
double symmetric_defect(const MatrixXd& m);

bool is_effectively_real(const MatrixXc& m, double tol = 1e-14);

}  // namespace qsd
