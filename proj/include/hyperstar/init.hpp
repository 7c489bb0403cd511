#pragma once

#include <random>
#include <string>
#include <vector>

#include "hyperstar/tensor.hpp"

namespace hyperstar {

enum class AScheme { xavier, quat_pattern, rand_integer };
enum class FScheme { xavier_normal, kaiming };

AScheme a_scheme_from_string(const std::string& s);
const char* to_string(AScheme s);

// A[n,n,n] entries ~ Normal(0, 1/n), i.e. Xavier-normal for an n x n block.
void init_xavier_A(Tensor& a, int n, std::mt19937_64& rng);

// A holds the fixed Hamilton ±1/0 pattern; requires n == 4.
void init_quat_pattern_A(Tensor& a, int n);

// A entries uniform over {-1, 0, 1}.
void init_rand_integer_A(Tensor& a, int n, std::mt19937_64& rng);

void init_A(Tensor& a, int n, AScheme scheme, std::mt19937_64& rng);

// Normal(0, 2/(fan_in+fan_out)) and Normal(0, 2/fan_in).
void fill_xavier_normal(Tensor& t, int64_t fan_in, int64_t fan_out, std::mt19937_64& rng);
void fill_kaiming(Tensor& t, int64_t fan_in, std::mt19937_64& rng);

// Training state is kept on the f32 grid (computed in f64) so that
// checkpoints round-trip losslessly; this rounds every entry to the nearest
// 32-bit value.
double snap_f32(double v);
void snap_f32(Tensor& t);

struct DensityRow {
  std::string scheme;
  double bin_left;
  double bin_right;
  double density;
};

struct SchemeStats {
  std::string scheme;
  double variance;
  double excess_kurtosis;
};

struct DensityReport {
  std::vector<DensityRow> rows;
  std::vector<SchemeStats> stats;
};

// Histogram of the entries of one or more weight tensors under a scheme
// label, normalized so the densities of each scheme sum to 1.
DensityReport weight_density_report(
    const std::vector<std::pair<std::string, std::vector<const Tensor*>>>& schemes, int bins);

std::string density_report_csv(const DensityReport& report);

}  // namespace hyperstar
