#include "kqw/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <sstream>

#include "kqw/errors.hpp"

namespace kqw {

namespace {

// QUADPACK qk21 abscissae and weights.
constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452, 0.930157491355708226001207180059508,
    0.865063366688984510732096688423493, 0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784, 0.294392862701460198131126603103866,
    0.148874338981631210884826001129720, 0.000000000000000000000000000000000};
constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390, 0.054755896574351996031381300244580,
    0.075039674810919952767043140916190, 0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707, 0.142775938577060080797094273138717,
    0.147739104901338491374841515972068, 0.149445554002916905664936468389821};
constexpr std::array<double, 5> kWg = {0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
                                       0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
                                       0.295524224714752870173892994651338};

struct Panel {
  double a = 0.0;
  double b = 0.0;
  std::vector<double> value;
  std::vector<double> abs_value;
  double error = 0.0;
};

struct ByError {
  bool operator()(const Panel& l, const Panel& r) const { return l.error < r.error; }
};

Panel gauss_kronrod(const VectorIntegrand& f, int dim, double a, double b, std::vector<double>& scratch) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  std::vector<double> fvals(static_cast<std::size_t>(21 * dim));
  auto eval = [&](int slot, double x) {
    f(x, std::span<double>(scratch.data(), dim));
    std::copy_n(scratch.begin(), dim, fvals.begin() + slot * dim);
  };
  eval(0, center);
  for (int j = 0; j < 10; ++j) {
    const double dx = half * kXgk[j];
    eval(1 + 2 * j, center - dx);
    eval(2 + 2 * j, center + dx);
  }

  Panel p{a, b, std::vector<double>(dim), std::vector<double>(dim), 0.0};
  for (int c = 0; c < dim; ++c) {
    const double fc = fvals[c];
    double kron = kWgk[10] * fc;
    double gauss = 0.0;
    double kabs = kWgk[10] * std::abs(fc);
    for (int j = 0; j < 10; ++j) {
      const double f1 = fvals[(1 + 2 * j) * dim + c];
      const double f2 = fvals[(2 + 2 * j) * dim + c];
      kron += kWgk[j] * (f1 + f2);
      kabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
      if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
    }
    const double mean = 0.5 * kron;
    double asc = kWgk[10] * std::abs(fc - mean);
    for (int j = 0; j < 10; ++j) {
      asc += kWgk[j] * (std::abs(fvals[(1 + 2 * j) * dim + c] - mean) + std::abs(fvals[(2 + 2 * j) * dim + c] - mean));
    }
    asc *= std::abs(half);
    double err = std::abs((kron - gauss) * half);
    if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
    p.value[c] = kron * half;
    p.abs_value[c] = kabs * std::abs(half);
    p.error += err;
  }
  return p;
}

}  // namespace

QuadratureResult integrate(const VectorIntegrand& f, int components, double a, double b,
                           std::span<const double> breakpoints, const QuadratureSpec& spec) {
  std::vector<double> edges{a};
  std::vector<double> inner(breakpoints.begin(), breakpoints.end());
  std::sort(inner.begin(), inner.end());
  for (double x : inner) {
    if (x > edges.back() && x < b) edges.push_back(x);
  }
  edges.push_back(b);

  std::vector<double> scratch(components);
  std::priority_queue<Panel, std::vector<Panel>, ByError> heap;
  QuadratureResult r{std::vector<double>(components, 0.0), std::vector<double>(components, 0.0), 0.0, 0, 0};
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    heap.push(gauss_kronrod(f, components, edges[i], edges[i + 1], scratch));
    r.evaluations += 21;
  }

  auto totals = [&] {
    std::vector<double> v(components, 0.0), av(components, 0.0);
    double err = 0.0;
    auto copy = heap;
    while (!copy.empty()) {
      const Panel& p = copy.top();
      for (int c = 0; c < components; ++c) {
        v[c] += p.value[c];
        av[c] += p.abs_value[c];
      }
      err += p.error;
      copy.pop();
    }
    r.value = v;
    r.abs_value = av;
    r.error = err;
  };

  // Running sums are refreshed from scratch periodically to avoid drift.
  totals();
  int since_refresh = 0;
  while (true) {
    double scale = 0.0;
    for (double v : r.abs_value) scale += v;
    const double target = std::max(spec.abs_tol, spec.rel_tol * scale);
    if (r.error <= target) break;
    if (static_cast<int>(heap.size()) >= spec.max_panels) {
      std::ostringstream os;
      os << "quadrature did not converge on [" << a << ", " << b << "] after " << heap.size()
         << " panels: error estimate " << r.error << " above target " << target << "; estimate";
      for (double v : r.value) os << ' ' << v;
      throw NumericalError(os.str());
    }
    Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    Panel left = gauss_kronrod(f, components, worst.a, mid, scratch);
    Panel right = gauss_kronrod(f, components, mid, worst.b, scratch);
    r.evaluations += 42;
    for (int c = 0; c < components; ++c) {
      r.value[c] += left.value[c] + right.value[c] - worst.value[c];
      r.abs_value[c] += left.abs_value[c] + right.abs_value[c] - worst.abs_value[c];
    }
    r.error += left.error + right.error - worst.error;
    heap.push(std::move(left));
    heap.push(std::move(right));
    if (++since_refresh == 200) {
      totals();
      since_refresh = 0;
    }
  }
  totals();
  r.panels = static_cast<int>(heap.size());
  return r;
}

}  // namespace kqw
