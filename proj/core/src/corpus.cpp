#include "hypsob/corpus.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "hypsob/sharpness_optimizer.hpp"

namespace hypsob {

namespace {

RadialProfile closed(std::string name, RadialProfile::Fn value, RadialProfile::Fn slope, Tail tail,
                     std::vector<double> hints = {}, std::vector<double> breakpoints = {}) {
  RadialProfile::Analytic spec;
  spec.name = std::move(name);
  spec.value = std::move(value);
  spec.slope = std::move(slope);
  spec.tail = tail;
  spec.scale_hints = std::move(hints);
  spec.breakpoints = std::move(breakpoints);
  return RadialProfile::analytic(std::move(spec));
}

RadialProfile gaussian(std::string name, double width) {
  return closed(
      std::move(name), [width](double s) { return std::exp(-(s / width) * (s / width)); },
      [width](double s) {
        const double x = s / width;
        return -2.0 * x * std::exp(-x * x) / width;
      },
      Tail{TailKind::exponential, 1.0 / width}, {width});
}

// exp(1 - 1/(1 - (s/w)^2)) on [0, w)
RadialProfile bump(std::string name, double width) {
  return closed(
      std::move(name),
      [width](double s) {
        const double x = s / width;
        return x >= 1.0 ? 0.0 : std::exp(1.0 - 1.0 / (1.0 - x * x));
      },
      [width](double s) {
        const double x = s / width;
        if (x >= 1.0) return 0.0;
        const double d = 1.0 - x * x;
        return -std::exp(1.0 - 1.0 / d) * 2.0 * x / (d * d) / width;
      },
      Tail{TailKind::compact, width}, {});
}

// (1 + s/a)^{-k}
RadialProfile power_law(std::string name, double a, double k) {
  return closed(
      std::move(name), [a, k](double s) { return std::pow(1.0 + s / a, -k); },
      [a, k](double s) { return -k / a * std::pow(1.0 + s / a, -k - 1.0); }, Tail{TailKind::power, k}, {a});
}

RadialProfile sampled(std::string name, const RadialProfile& source, const std::vector<double>& nodes) {
  return source.sampled(nodes).renamed(std::move(name));
}

}  // namespace

std::vector<RadialProfile> standard_corpus() {
  using std::numbers::pi;
  std::vector<RadialProfile> out;
  out.push_back(tent_profile(1.0).renamed("tent_1"));
  out.push_back(tent_profile(0.01).renamed("tent_0.01"));
  out.push_back(tent_profile(100.0).renamed("tent_100"));
  out.push_back(exponential_profile(1.0).renamed("exp_1"));
  out.push_back(exponential_profile(0.1).renamed("exp_0.1"));
  out.push_back(exponential_profile(10.0).renamed("exp_10"));
  out.push_back(gaussian("gauss_1", 1.0));
  out.push_back(gaussian("gauss_50", 50.0));
  out.push_back(bump("bump_1", 1.0));
  out.push_back(bump("bump_5", 5.0));
  out.push_back(closed(
      "quadratic_cap", [](double s) { return s >= 1.0 ? 0.0 : (1.0 - s) * (1.0 - s); },
      [](double s) { return s >= 1.0 ? 0.0 : -2.0 * (1.0 - s); }, Tail{TailKind::compact, 1.0}));
  out.push_back(closed(
      "cosine_2", [](double s) { return s >= 2.0 ? 0.0 : 0.5 * (1.0 + std::cos(pi * s / 2.0)); },
      [](double s) { return s >= 2.0 ? 0.0 : -0.25 * pi * std::sin(pi * s / 2.0); }, Tail{TailKind::compact, 2.0}));
  out.push_back(power_law("power_1_3", 1.0, 3.0));
  out.push_back(power_law("power_0.01_2", 0.01, 2.0));
  // 1 on [0, 1], C^1 ramp to 0 on [1, 2]
  out.push_back(closed(
      "plateau_ramp",
      [](double s) {
        if (s <= 1.0) return 1.0;
        if (s >= 2.0) return 0.0;
        const double y = s - 1.0;
        return 1.0 - y * y * (3.0 - 2.0 * y);
      },
      [](double s) {
        if (s <= 1.0 || s >= 2.0) return 0.0;
        const double y = s - 1.0;
        return 6.0 * y * (y - 1.0);
      },
      Tail{TailKind::compact, 2.0}, {}, {1.0}));
  out.push_back(closed(
      "two_scale", [](double s) { return 0.5 * (std::exp(-s) + std::exp(-s / 100.0)); },
      [](double s) { return -0.5 * (std::exp(-s) + std::exp(-s / 100.0) / 100.0); },
      Tail{TailKind::exponential, 0.01}, {1.0, 100.0}));
  out.push_back(closed(
      "sqrt_cusp", [](double s) { return s >= 1.0 ? 0.0 : 1.0 - std::sqrt(s); },
      [](double s) {
        if (s >= 1.0) return 0.0;
        return s <= 0.0 ? -std::numeric_limits<double>::infinity() : -0.5 / std::sqrt(s);
      },
      Tail{TailKind::compact, 1.0}));
  out.push_back(closed(
      "stretched_exp", [](double s) { return std::exp(-std::sqrt(s)); },
      [](double s) {
        if (s <= 0.0) return -std::numeric_limits<double>::infinity();
        const double r = std::sqrt(s);
        return -std::exp(-r) / (2.0 * r);
      },
      Tail{TailKind::exponential, 1.0}, {1.0, 100.0}));
  std::vector<double> nodes{0.0};
  for (double x : GridSpec{1e-4, 50.0, 40}.nodes(1.0)) {
    if (x > 0.0) nodes.push_back(x);
  }
  out.push_back(sampled("grid_exp_poly",
                        closed(
                            "", [](double s) { return (1.0 + s) * std::exp(-s); },
                            [](double s) { return -s * std::exp(-s); }, Tail{TailKind::exponential, 1.0}),
                        nodes));
  std::vector<double> bump_nodes;
  for (int i = 0; i <= 400; ++i) bump_nodes.push_back(3.0 * i / 400.0);
  out.push_back(sampled("grid_bump_3", bump("", 3.0), bump_nodes));
  return out;
}

std::vector<RadialProfile> bubble_corpus(int n, double p) {
  std::vector<RadialProfile> out;
  for (double lambda : {1.0, 1e-1, 1e-2, 1e-3, 1e-4}) out.push_back(truncated_bubble(n, p, lambda, 1.0));
  return out;
}

}  // namespace hypsob
