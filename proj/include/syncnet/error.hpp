#pragma once

#include <stdexcept>
#include <string>

namespace syncnet {

// Base class for every domain failure raised by the library. The CLI maps
// these to exit code 1; parse/validation problems use InputError (exit 2).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

class ZeroRange : public Error {
 public:
  using Error::Error;
};

class SplitFailed : public Error {
 public:
  using Error::Error;
};

class NearSingular : public Error {
 public:
  using Error::Error;
};

class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  NoConvergence(double residual, long iterations)
      : Error("invariant form did not converge: residual " +
              std::to_string(residual) + " after " +
              std::to_string(iterations) + " iterations"),
        residual_(residual),
        iterations_(iterations) {}

  double residual() const { return residual_; }
  long iterations() const { return iterations_; }

 private:
  double residual_;
  long iterations_;
};

class AssumptionViolated : public Error {
 public:
  using Error::Error;
};

class RankDeficientCU : public Error {
 public:
  RankDeficientCU(int rank, int outputs)
      : Error("C*U has rank " + std::to_string(rank) + " < " +
              std::to_string(outputs) +
              " outputs (enable output reduction to proceed)"),
        rank_(rank),
        outputs_(outputs) {}

  int rank() const { return rank_; }
  int outputs() const { return outputs_; }

 private:
  int rank_;
  int outputs_;
};

class DivergenceDetected : public Error {
 public:
  DivergenceDetected(long step, double magnitude)
      : Error("state magnitude " + std::to_string(magnitude) +
              " exceeded overflow bound at step " + std::to_string(step)),
        step_(step),
        magnitude_(magnitude) {}

  long step() const { return step_; }
  double magnitude() const { return magnitude_; }

 private:
  long step_;
  double magnitude_;
};

class TooLarge : public Error {
 public:
  using Error::Error;
};

}  // namespace syncnet
