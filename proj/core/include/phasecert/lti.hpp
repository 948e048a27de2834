#pragma once

#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace phasecert {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

struct SingularResolvent : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IllPosedLoop : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Real continuous-time LTI system x' = Ax + Bu, y = Cx + Du.
// n = 0 is a static gain.
struct StateSpace {
  Mat A, B, C, D;

  StateSpace() = default;
  StateSpace(Mat a, Mat b, Mat c, Mat d);

  int states() const { return static_cast<int>(A.rows()); }
  int inputs() const { return static_cast<int>(D.cols()); }
  int outputs() const { return static_cast<int>(D.rows()); }

  static StateSpace gain(const Mat& d);
  static StateSpace zero(int outputs, int inputs);
  static StateSpace integrator(int width);
};

// C (sI - A)^{-1} B + D
CMat evaluate(const StateSpace& g, cd s);

// y = g2(g1(u))
StateSpace series(const StateSpace& g1, const StateSpace& g2);
// g1 * g2 as transfer matrices (g2 applied first)
StateSpace multiply(const StateSpace& g1, const StateSpace& g2);
StateSpace parallel(const StateSpace& g1, const StateSpace& g2);
StateSpace scale(double k, const StateSpace& g);
StateSpace left_multiply(const Mat& m, const StateSpace& g);
StateSpace right_multiply(const StateSpace& g, const Mat& m);
StateSpace block_diagonal(const std::vector<StateSpace>& parts);

// Closes the lower channels of p (inputs [w; u], outputs [z; y]) with
// u = sign * k y. nw and nz are the sizes of the exogenous channels.
StateSpace lft(const StateSpace& p, const StateSpace& k, int nw, int nz, int sign);

// y = g1 e, e = u + sign * g2 y. sign = -1 is the usual negative feedback.
StateSpace feedback(const StateSpace& g1, const StateSpace& g2, int sign = -1);

// Inverse of a biproper system (D invertible).
StateSpace inverse(const StateSpace& g);

// Controllable canonical realization of num(s)/den(s); coefficients in
// descending powers, deg num <= deg den.
StateSpace transfer_function(const std::vector<double>& num, const std::vector<double>& den);

// One output, several inputs sharing a denominator (observable canonical form).
StateSpace transfer_function_row(const std::vector<std::vector<double>>& nums, const std::vector<double>& den);

// Real-coefficient p x m system g evaluated at s + j*w0 and acting on complex
// signals, realized as a real 2p x 2m dq model. Signal k occupies rows or
// columns (2k, 2k+1). This is how alpha-beta controllers appear in a frame
// rotating at w0.
StateSpace frequency_shift(const StateSpace& g, double w0);

// Diagonal similarity with power-of-two entries so rows and columns of A
// have comparable norms. Same transfer function.
StateSpace balance(const StateSpace& g);

std::vector<cd> poles(const StateSpace& g);

struct StabilityResult {
  bool stable = true;
  double max_real = -std::numeric_limits<double>::infinity();
  std::vector<cd> spectrum;
};

// Real parts within kRealTolerance of -margin count as unstable.
inline constexpr double kRealTolerance = 1e-9;
StabilityResult is_stable(const StateSpace& g, double margin = 0.0);
StabilityResult spectrum_stability(std::vector<cd> spectrum, double margin = 0.0);

// Rotation by 90 degrees, [[0, -1], [1, 0]].
Mat rot90();
// Real 2x2 matrix representing multiplication by a complex scalar.
Mat complex_block(cd g);

// Frequencies in Hz, sorted, unique, non-negative.
class FrequencyGrid {
 public:
  FrequencyGrid() = default;
  explicit FrequencyGrid(std::vector<double> hz);

  static FrequencyGrid logspace(double fmin_hz, double fmax_hz, int points, bool include_zero);
  static FrequencyGrid standard() { return logspace(0.01, 1e4, 400, true); }

  const std::vector<double>& hz() const { return hz_; }
  std::size_t size() const { return hz_.size(); }
  double operator[](std::size_t i) const { return hz_[i]; }

 private:
  std::vector<double> hz_;
};

namespace poly {
std::vector<double> multiply(const std::vector<double>& a, const std::vector<double>& b);
std::vector<double> add(const std::vector<double>& a, const std::vector<double>& b);
std::vector<double> scale(double k, const std::vector<double>& a);
cd evaluate(const std::vector<double>& a, cd s);
}  // namespace poly

}  // namespace phasecert
