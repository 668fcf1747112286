#include "semm/distributions.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "semm/error.hpp"

namespace semm {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_finite(double value, const std::string& field) {
  if (!std::isfinite(value)) throw ValidationError(field, "must be finite");
}

// sin(y)/y with a series near zero.
double sinc(double y) {
  if (std::abs(y) < 1e-4) {
    const double y2 = y * y;
    return 1.0 - y2 / 6.0 + y2 * y2 / 120.0;
  }
  return std::sin(y) / y;
}

void validate_at(const DistributionSpec& d, const std::string& path) {
  std::visit(Overloaded{
                 [&](const Delta& v) { require_finite(v.k0, path + ".k0"); },
                 [&](const Gaussian& v) {
                   require_finite(v.mean, path + ".mean");
                   require_finite(v.sigma, path + ".sigma");
                   if (!(v.sigma > 0.0)) throw ValidationError(path + ".sigma", "must be positive");
                 },
                 [&](const Lorentzian& v) {
                   require_finite(v.center, path + ".center");
                   require_finite(v.gamma, path + ".gamma");
                   if (!(v.gamma > 0.0)) throw ValidationError(path + ".gamma", "must be positive");
                 },
                 [&](const Uniform& v) {
                   require_finite(v.lo, path + ".lo");
                   require_finite(v.hi, path + ".hi");
                   if (!(v.hi > v.lo)) throw ValidationError(path + ".hi", "must exceed lo");
                 },
                 [&](const Mixture& v) {
                   if (v.components.empty()) throw ValidationError(path + ".components", "must not be empty");
                   double total = 0.0;
                   for (std::size_t i = 0; i < v.components.size(); ++i) {
                     const std::string item = path + ".components[" + std::to_string(i) + "]";
                     const double w = v.components[i].weight;
                     require_finite(w, item + ".weight");
                     if (w < 0.0) throw ValidationError(item + ".weight", "must be nonnegative");
                     total += w;
                     validate_at(v.components[i].dist, item + ".dist");
                   }
                   if (std::abs(total - 1.0) > 1e-12)
                     throw ValidationError(path + ".components", "weights must sum to 1");
                 },
                 [&](const Table& v) {
                   if (v.k.size() < 2) throw ValidationError(path + ".rows", "needs at least 2 rows");
                   if (v.k.size() != v.density.size()) throw ValidationError(path + ".rows", "ragged table");
                   for (std::size_t i = 0; i < v.k.size(); ++i) {
                     require_finite(v.k[i], path + ".rows[" + std::to_string(i) + "].k");
                     require_finite(v.density[i], path + ".rows[" + std::to_string(i) + "].density");
                     if (v.density[i] < 0.0)
                       throw ValidationError(path + ".rows[" + std::to_string(i) + "].density", "must be nonnegative");
                     if (i > 0 && !(v.k[i] > v.k[i - 1]))
                       throw ValidationError(path + ".rows[" + std::to_string(i) + "].k", "must be strictly increasing");
                   }
                   if (v.cumulative.size() != v.k.size() || std::abs(v.cumulative.back() - 1.0) > 1e-9)
                     throw ValidationError(path + ".rows", "density is not normalized");
                 },
             },
             d.kind);
}

double table_pdf(const Table& t, double k) {
  if (k < t.k.front() || k > t.k.back()) return 0.0;
  auto it = std::upper_bound(t.k.begin(), t.k.end(), k);
  if (it == t.k.end()) return t.density.back();
  const auto i = static_cast<std::size_t>(it - t.k.begin()) - 1;
  const double f = (k - t.k[i]) / (t.k[i + 1] - t.k[i]);
  return t.density[i] + f * (t.density[i + 1] - t.density[i]);
}

double table_ft(const Table& t, double x) {
  if (x == 0.0) return 1.0;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < t.k.size(); ++i) {
    const double a = t.k[i];
    const double b = t.k[i + 1];
    const double pa = t.density[i];
    const double pb = t.density[i + 1];
    if (pa == 0.0 && pb == 0.0) continue;
    auto f = [&](double k) { return (pa + (k - a) / (b - a) * (pb - pa)) * std::cos(kTwoPi * k * x); };
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 20, 1e-13);
  }
  return total;
}

double table_draw(const Table& t, double u) {
  auto it = std::upper_bound(t.cumulative.begin(), t.cumulative.end(), u);
  std::size_t i = it == t.cumulative.begin() ? 0 : static_cast<std::size_t>(it - t.cumulative.begin()) - 1;
  i = std::min(i, t.k.size() - 2);
  const double h = t.k[i + 1] - t.k[i];
  const double pa = t.density[i];
  const double pb = t.density[i + 1];
  const double m = u - t.cumulative[i];
  const double slope = (pb - pa) / h;
  double s;
  if (std::abs(slope) * h < 1e-12 * std::max(pa, 1e-300)) {
    s = pa > 0.0 ? m / pa : 0.5 * h;
  } else {
    // pa*s + slope*s^2/2 = m
    const double disc = std::max(0.0, pa * pa + 2.0 * slope * m);
    s = 2.0 * m / (pa + std::sqrt(disc));
  }
  return t.k[i] + std::clamp(s, 0.0, h);
}

// Largest-remainder split of n nodes over the positive masses, each getting at least one.
std::vector<std::size_t> allocate(std::size_t n, const std::vector<double>& masses, const std::string& field) {
  std::size_t positive = 0;
  double total = 0.0;
  for (double m : masses) {
    if (m > 0.0) ++positive;
    total += m;
  }
  if (n < positive) throw ValidationError(field, "needs at least " + std::to_string(positive) + " nodes");
  std::vector<std::size_t> counts(masses.size(), 0);
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t used = 0;
  const std::size_t free_nodes = n - positive;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    if (masses[i] <= 0.0) continue;
    const double share = static_cast<double>(free_nodes) * masses[i] / total;
    const auto whole = static_cast<std::size_t>(std::floor(share));
    counts[i] = 1 + whole;
    used += counts[i];
    remainders.emplace_back(share - static_cast<double>(whole), i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t j = 0; used < n; ++j, ++used) ++counts[remainders[j % remainders.size()].second];
  return counts;
}

QuadratureRule lorentzian_rule(const Lorentzian& l, std::size_t n) {
  QuadratureRule rule;
  if (n < 16) {
    for (std::size_t i = 0; i < n; ++i) {
      const double theta = kPi * ((static_cast<double>(i) + 0.5) / static_cast<double>(n) - 0.5);
      rule.nodes.push_back(l.center + l.gamma * std::tan(theta));
      rule.weights.push_back(1.0 / static_cast<double>(n));
    }
    return rule;
  }
  // Panels graded geometrically in s = pi/2 - |theta| down to s_min; the
  // mass beyond s_min (2 s_min / pi) is dropped and the rule renormalized.
  const double s_min = std::min(0.04 / static_cast<double>(n), 1e-3);
  const std::size_t per_side = std::max<std::size_t>(1, n / 16);
  std::vector<double> s(per_side + 1);
  for (std::size_t j = 0; j <= per_side; ++j)
    s[j] = s_min * std::pow(0.5 * kPi / s_min, static_cast<double>(j) / static_cast<double>(per_side));
  s[per_side] = 0.5 * kPi;
  std::vector<double> edges;
  for (std::size_t j = 0; j <= per_side; ++j) edges.push_back(-0.5 * kPi + s[j]);
  for (std::size_t j = per_side; j-- > 0;) edges.push_back(0.5 * kPi - s[j]);
  edges[per_side] = 0.0;
  const QuadratureRule theta = composite_gauss_legendre(edges, n);
  for (std::size_t i = 0; i < theta.size(); ++i) {
    rule.nodes.push_back(l.center + l.gamma * std::tan(theta.nodes[i]));
    rule.weights.push_back(theta.weights[i] / kPi);
  }
  rule.normalize();
  return rule;
}

QuadratureRule table_rule(const Table& t, std::size_t n) {
  std::vector<double> masses;
  for (std::size_t i = 0; i + 1 < t.k.size(); ++i) masses.push_back(t.cumulative[i + 1] - t.cumulative[i]);
  const auto counts = allocate(n, masses, "n");
  QuadratureRule rule;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) continue;
    const double edges[2] = {t.k[i], t.k[i + 1]};
    const QuadratureRule gl = composite_gauss_legendre(edges, counts[i]);
    for (std::size_t j = 0; j < gl.size(); ++j) {
      rule.nodes.push_back(gl.nodes[j]);
      rule.weights.push_back(gl.weights[j] * table_pdf(t, gl.nodes[j]));
    }
  }
  rule.normalize();
  return rule;
}

}  // namespace

DistributionSpec delta(double k0) {
  DistributionSpec d{Delta{k0}};
  validate(d);
  return d;
}

DistributionSpec gaussian(double mean, double sigma) {
  DistributionSpec d{Gaussian{mean, sigma}};
  validate(d);
  return d;
}

DistributionSpec gaussian_fwhm(double mean, double fwhm) {
  return gaussian(mean, fwhm / (2.0 * std::sqrt(2.0 * std::numbers::ln2)));
}

DistributionSpec lorentzian(double center, double gamma) {
  DistributionSpec d{Lorentzian{center, gamma}};
  validate(d);
  return d;
}

DistributionSpec uniform(double lo, double hi) {
  DistributionSpec d{Uniform{lo, hi}};
  validate(d);
  return d;
}

DistributionSpec mixture(std::vector<MixtureComponent> components) {
  DistributionSpec d{Mixture{std::move(components)}};
  validate(d);
  return d;
}

DistributionSpec table(std::vector<std::pair<double, double>> rows) {
  if (rows.size() < 2) throw ValidationError("table.rows", "needs at least 2 rows");
  Table t;
  for (const auto& [k, p] : rows) {
    t.k.push_back(k);
    t.density.push_back(p);
  }
  t.cumulative.assign(t.k.size(), 0.0);
  for (std::size_t i = 0; i + 1 < t.k.size(); ++i)
    t.cumulative[i + 1] = t.cumulative[i] + 0.5 * (t.density[i] + t.density[i + 1]) * (t.k[i + 1] - t.k[i]);
  const double mass = t.cumulative.back();
  if (!(mass > 0.0) || !std::isfinite(mass)) throw ValidationError("table.rows", "distribution is not normalizable");
  for (double& p : t.density) p /= mass;
  for (double& c : t.cumulative) c /= mass;
  t.cumulative.back() = 1.0;
  DistributionSpec d{std::move(t)};
  validate(d);
  return d;
}

DistributionSpec table_from_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("table.csv", "cannot open " + path.string());
  std::vector<std::pair<double, double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    double k = 0.0;
    double p = 0.0;
    if (!(fields >> k >> p)) {
      if (first) {
        first = false;
        continue;
      }
      throw ValidationError("table.csv", "malformed row: " + line);
    }
    first = false;
    rows.emplace_back(k, p);
  }
  return table(std::move(rows));
}

void validate(const DistributionSpec& d) { validate_at(d, kind_name(d)); }

std::string kind_name(const DistributionSpec& d) {
  static const char* const names[] = {"delta", "gaussian", "lorentzian", "uniform", "mixture", "table"};
  return names[d.kind.index()];
}

double pdf(const DistributionSpec& d, double k) {
  return std::visit(Overloaded{
                        [](const Delta&) -> double {
                          throw UnsupportedOperation("pdf of a delta distribution is not a function");
                        },
                        [&](const Gaussian& v) {
                          const double z = (k - v.mean) / v.sigma;
                          return std::exp(-0.5 * z * z) / (v.sigma * std::sqrt(kTwoPi));
                        },
                        [&](const Lorentzian& v) {
                          const double dk = k - v.center;
                          return v.gamma / (kPi * (v.gamma * v.gamma + dk * dk));
                        },
                        [&](const Uniform& v) { return (k >= v.lo && k <= v.hi) ? 1.0 / (v.hi - v.lo) : 0.0; },
                        [&](const Mixture& v) {
                          double total = 0.0;
                          for (const auto& c : v.components)
                            if (c.weight > 0.0) total += c.weight * pdf(c.dist, k);
                          return total;
                        },
                        [&](const Table& v) { return table_pdf(v, k); },
                    },
                    d.kind);
}

double ft_real(const DistributionSpec& d, double x) {
  return std::visit(Overloaded{
                        [&](const Delta& v) { return std::cos(kTwoPi * v.k0 * x); },
                        [&](const Gaussian& v) {
                          return std::cos(kTwoPi * v.mean * x) *
                                 std::exp(-2.0 * kPi * kPi * v.sigma * v.sigma * x * x);
                        },
                        [&](const Lorentzian& v) {
                          return std::cos(kTwoPi * v.center * x) * std::exp(-kTwoPi * v.gamma * std::abs(x));
                        },
                        [&](const Uniform& v) {
                          const double mid = 0.5 * (v.lo + v.hi);
                          return std::cos(kTwoPi * mid * x) * sinc(kPi * (v.hi - v.lo) * x);
                        },
                        [&](const Mixture& v) {
                          double total = 0.0;
                          for (const auto& c : v.components) total += c.weight * ft_real(c.dist, x);
                          return total;
                        },
                        [&](const Table& v) { return table_ft(v, x); },
                    },
                    d.kind);
}

double mean(const DistributionSpec& d) {
  return std::visit(Overloaded{
                        [](const Delta& v) { return v.k0; },
                        [](const Gaussian& v) { return v.mean; },
                        [](const Lorentzian&) -> double {
                          throw UnsupportedOperation("the Lorentzian has no mean");
                        },
                        [](const Uniform& v) { return 0.5 * (v.lo + v.hi); },
                        [](const Mixture& v) {
                          double total = 0.0;
                          for (const auto& c : v.components)
                            if (c.weight > 0.0) total += c.weight * mean(c.dist);
                          return total;
                        },
                        [](const Table& v) {
                          double total = 0.0;
                          for (std::size_t i = 0; i + 1 < v.k.size(); ++i) {
                            const double a = v.k[i];
                            const double b = v.k[i + 1];
                            total += (b - a) * (v.density[i] * (2.0 * a + b) + v.density[i + 1] * (a + 2.0 * b)) / 6.0;
                          }
                          return total;
                        },
                    },
                    d.kind);
}

double draw(const DistributionSpec& d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  return std::visit(Overloaded{
                        [](const Delta& v) { return v.k0; },
                        [&](const Gaussian& v) { return std::normal_distribution<double>(v.mean, v.sigma)(rng); },
                        [&](const Lorentzian& v) { return v.center + v.gamma * std::tan(kPi * (unit(rng) - 0.5)); },
                        [&](const Uniform& v) { return v.lo + (v.hi - v.lo) * unit(rng); },
                        [&](const Mixture& v) {
                          double u = unit(rng);
                          for (const auto& c : v.components) {
                            if (u < c.weight) return draw(c.dist, rng);
                            u -= c.weight;
                          }
                          for (auto it = v.components.rbegin(); it != v.components.rend(); ++it)
                            if (it->weight > 0.0) return draw(it->dist, rng);
                          return draw(v.components.back().dist, rng);
                        },
                        [&](const Table& v) { return table_draw(v, unit(rng)); },
                    },
                    d.kind);
}

std::vector<double> sample(const DistributionSpec& d, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw ValidationError("n", "must be at least 1");
  validate(d);
  std::mt19937_64 rng(seed);
  std::vector<double> out(n);
  for (double& x : out) x = draw(d, rng);
  return out;
}

QuadratureRule quadrature(const DistributionSpec& d, std::size_t n) {
  if (n < 1) throw ValidationError("n", "must be at least 1");
  const double equal = 1.0 / static_cast<double>(n);
  return std::visit(
      Overloaded{
          [&](const Delta& v) {
            return QuadratureRule{std::vector<double>(n, v.k0), std::vector<double>(n, equal)};
          },
          [&](const Uniform& v) {
            QuadratureRule rule;
            for (std::size_t i = 0; i < n; ++i) {
              rule.nodes.push_back(v.lo + (v.hi - v.lo) * (static_cast<double>(i) + 0.5) * equal);
              rule.weights.push_back(equal);
            }
            return rule;
          },
          [&](const Gaussian& v) {
            if (n == 1) return QuadratureRule{{v.mean}, {1.0}};
            // Truncation error exp(-L^2/2) balanced against aliasing for small n.
            const double half_span = std::min(9.5, std::sqrt(kPi * static_cast<double>(n - 1)));
            QuadratureRule rule;
            for (std::size_t i = 0; i < n; ++i) {
              const double z = -half_span + 2.0 * half_span * static_cast<double>(i) / static_cast<double>(n - 1);
              rule.nodes.push_back(v.mean + v.sigma * z);
              rule.weights.push_back(std::exp(-0.5 * z * z));
            }
            rule.normalize();
            return rule;
          },
          [&](const Lorentzian& v) { return lorentzian_rule(v, n); },
          [&](const Mixture& v) {
            std::vector<double> masses;
            for (const auto& c : v.components) masses.push_back(c.weight);
            const auto counts = allocate(n, masses, "n");
            QuadratureRule rule;
            for (std::size_t i = 0; i < counts.size(); ++i)
              if (counts[i] > 0) rule.append(quadrature(v.components[i].dist, counts[i]), v.components[i].weight);
            rule.normalize();
            return rule;
          },
          [&](const Table& v) { return table_rule(v, n); },
      },
      d.kind);
}

}  // namespace semm
