#include "stieltjes/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "stieltjes/errors.hpp"

namespace stieltjes {
namespace {

// Kronrod abscissae on [-1, 1]; odd indices are the 7-point Gauss nodes.
constexpr double kNodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kKronrodWeights[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kGaussWeights[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Panel {
  double a;
  double b;
  double value;
  double error;
  double resabs;
  int depth;
  bool operator<(const Panel& other) const { return error < other.error; }
};

Panel qk15(const std::function<double(double)>& f, double a, double b, int depth) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double f_center = f(center);
  double gauss = f_center * kGaussWeights[3];
  double kronrod = f_center * kKronrodWeights[7];
  double resabs = std::abs(kronrod);
  double fv1[7];
  double fv2[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kNodes[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    fv1[j] = f1;
    fv2[j] = f2;
    kronrod += kKronrodWeights[j] * (f1 + f2);
    resabs += kKronrodWeights[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * (f1 + f2);
  }
  const double mean = 0.5 * kronrod;
  double resasc = kKronrodWeights[7] * std::abs(f_center - mean);
  for (int j = 0; j < 7; ++j)
    resasc += kKronrodWeights[j] * (std::abs(fv1[j] - mean) + std::abs(fv2[j] - mean));

  const double scale = std::abs(half);
  double error = std::abs((kronrod - gauss) * half);
  resasc *= scale;
  resabs *= scale;
  if (resasc != 0.0 && error != 0.0)
    error = resasc * std::min(1.0, std::pow(200.0 * error / resasc, 1.5));
  if (resabs > std::numeric_limits<double>::min() / (50.0 * kEps))
    error = std::max(50.0 * kEps * resabs, error);
  if (!std::isfinite(kronrod * half))
    throw QuadratureError("non-finite integrand value", kronrod * half, error);
  return Panel{a, b, kronrod * half, error, resabs, depth};
}

bool accepted(double value, double error, double resabs, const QuadratureOptions& options) {
  const double tol = std::max(options.abs_tol, options.rel_tol * std::abs(value));
  return error <= tol || error <= 2.0 * 50.0 * kEps * resabs;
}

}  // namespace

QuadratureResult gauss_kronrod(const std::function<double(double)>& f, double a, double b,
                               const QuadratureOptions& options) {
  if (a == b) return {};
  const Panel root = qk15(f, a, b, 0);
  if (accepted(root.value, root.error, root.resabs, options))
    return {root.value, root.error, 15};

  std::priority_queue<Panel> panels;
  panels.push(root);
  double value = root.value;
  double error = root.error;
  double resabs = root.resabs;
  int evaluations = 15;
  constexpr std::size_t kMaxPanels = 200000;

  while (!accepted(value, error, resabs, options)) {
    Panel worst = panels.top();
    if (worst.depth >= options.max_depth || panels.size() >= kMaxPanels) {
      throw QuadratureError("quadrature did not converge within the refinement cap", value,
                            error);
    }
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      throw QuadratureError("quadrature subinterval below floating-point resolution", value,
                            error);
    }
    const Panel left = qk15(f, worst.a, mid, worst.depth + 1);
    const Panel right = qk15(f, mid, worst.b, worst.depth + 1);
    evaluations += 30;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    resabs += left.resabs + right.resabs - worst.resabs;
    panels.push(left);
    panels.push(right);
  }

  // Re-sum to shed the drift accumulated by the running updates.
  value = 0.0;
  error = 0.0;
  while (!panels.empty()) {
    value += panels.top().value;
    error += panels.top().error;
    panels.pop();
  }
  return {value, error, evaluations};
}

}  // namespace stieltjes
