#include "hyperstar/init.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hyperstar/algebra.hpp"

namespace hyperstar {

AScheme a_scheme_from_string(const std::string& s) {
  if (s == "xavier") return AScheme::xavier;
  if (s == "quat_pattern") return AScheme::quat_pattern;
  if (s == "rand_integer") return AScheme::rand_integer;
  throw value_error("unknown algebra init scheme '" + s +
                    "' (expected xavier, quat_pattern or rand_integer)");
}

const char* to_string(AScheme s) {
  switch (s) {
    case AScheme::xavier: return "xavier";
    case AScheme::quat_pattern: return "quat_pattern";
    default: return "rand_integer";
  }
}

static void check_a_shape(const Tensor& a, int n) {
  if (a.shape() != Shape{n, n, n})
    throw shape_error("algebra tensor must be [" + std::to_string(n) + "," + std::to_string(n) +
                      "," + std::to_string(n) + "], got " + shape_str(a.shape()));
}

void init_xavier_A(Tensor& a, int n, std::mt19937_64& rng) {
  check_a_shape(a, n);
  std::normal_distribution<double> d(0.0, std::sqrt(1.0 / n));
  for (int64_t i = 0; i < a.numel(); ++i) a.data()[i] = d(rng);
}

void init_quat_pattern_A(Tensor& a, int n) {
  if (n != 4) throw value_error("quat_pattern requires n=4, got n=" + std::to_string(n));
  check_a_shape(a, n);
  fill_quaternion_pattern(a.data());
}

void init_rand_integer_A(Tensor& a, int n, std::mt19937_64& rng) {
  check_a_shape(a, n);
  std::uniform_int_distribution<int> d(-1, 1);
  for (int64_t i = 0; i < a.numel(); ++i) a.data()[i] = static_cast<double>(d(rng));
}

void init_A(Tensor& a, int n, AScheme scheme, std::mt19937_64& rng) {
  switch (scheme) {
    case AScheme::xavier: init_xavier_A(a, n, rng); break;
    case AScheme::quat_pattern: init_quat_pattern_A(a, n); break;
    case AScheme::rand_integer: init_rand_integer_A(a, n, rng); break;
  }
}

void fill_xavier_normal(Tensor& t, int64_t fan_in, int64_t fan_out, std::mt19937_64& rng) {
  std::normal_distribution<double> d(0.0, std::sqrt(2.0 / static_cast<double>(fan_in + fan_out)));
  for (int64_t i = 0; i < t.numel(); ++i) t.data()[i] = d(rng);
}

void fill_kaiming(Tensor& t, int64_t fan_in, std::mt19937_64& rng) {
  std::normal_distribution<double> d(0.0, std::sqrt(2.0 / static_cast<double>(fan_in)));
  for (int64_t i = 0; i < t.numel(); ++i) t.data()[i] = d(rng);
}

double snap_f32(double v) { return static_cast<double>(static_cast<float>(v)); }

void snap_f32(Tensor& t) {
  for (int64_t i = 0; i < t.numel(); ++i)
    t.data()[i] = static_cast<double>(static_cast<float>(t.data()[i]));
}

DensityReport weight_density_report(
    const std::vector<std::pair<std::string, std::vector<const Tensor*>>>& schemes, int bins) {
  if (bins < 2) throw value_error("density report needs at least 2 bins");
  if (schemes.empty()) throw value_error("density report needs at least one weight set");

  DensityReport report;
  for (const auto& [label, tensors] : schemes) {
    int64_t total = 0;
    double lo = 0, hi = 0;
    bool first = true;
    for (const Tensor* t : tensors) {
      total += t->numel();
      for (int64_t i = 0; i < t->numel(); ++i) {
        double v = t->data()[i];
        if (first) { lo = hi = v; first = false; }
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    if (total == 0) throw value_error("density report: scheme '" + label + "' has no weights");
    if (hi == lo) hi = lo + 1e-12;  // degenerate constant set: one spike bin

    const double width = (hi - lo) / bins;
    std::vector<int64_t> counts(bins, 0);
    double sum = 0, sum2 = 0;
    for (const Tensor* t : tensors)
      for (int64_t i = 0; i < t->numel(); ++i) {
        double v = t->data()[i];
        auto b = static_cast<int64_t>((v - lo) / width);
        b = std::clamp<int64_t>(b, 0, bins - 1);
        ++counts[b];
        sum += v;
        sum2 += v * v;
      }
    const double mean = sum / total;
    const double var = sum2 / total - mean * mean;
    double m4 = 0;
    for (const Tensor* t : tensors)
      for (int64_t i = 0; i < t->numel(); ++i) {
        const double d = t->data()[i] - mean;
        m4 += d * d * d * d;
      }
    m4 /= total;
    const double kurt = var > 0 ? m4 / (var * var) - 3.0 : 0.0;

    for (int b = 0; b < bins; ++b)
      report.rows.push_back({label, lo + b * width, lo + (b + 1) * width,
                             static_cast<double>(counts[b]) / static_cast<double>(total)});
    report.stats.push_back({label, var, kurt});
  }
  return report;
}

std::string density_report_csv(const DensityReport& report) {
  std::ostringstream os;
  os << "scheme,bin_left,bin_right,density\n";
  os.precision(17);
  for (const auto& r : report.rows)
    os << r.scheme << ',' << r.bin_left << ',' << r.bin_right << ',' << r.density << '\n';
  return os.str();
}

}  // namespace hyperstar
