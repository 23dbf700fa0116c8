#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ngrem/error.hpp"
#include "ngrem/free_energy.hpp"
#include "ngrem/model.hpp"
#include "ngrem/sizes.hpp"

namespace ngrem {

// ---------------------------------------------------------------------------
// Seeds
// ---------------------------------------------------------------------------

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Substream seed for (parent, key). Used as replica_seed = derive_seed(seed, replica)
// and field_seed = derive_seed(replica_seed, J mask).
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t key) noexcept {
  return mix64(mix64(parent) ^ mix64(key + 0x632be59bd9b4e019ULL));
}

// ---------------------------------------------------------------------------
// Field realization
// ---------------------------------------------------------------------------

struct FieldArray {
  SubsetMask subset;
  double variance = 0.0;  // a_J N_effective
  std::uint64_t stream_seed = 0;
  std::vector<double> values;  // indexed by the packed projected configuration sigma_J
};

struct FieldRealization {
  SizeAssignment size;
  std::uint64_t seed = 0;
  std::vector<FieldArray> fields;  // one per stored J, in model weight order
};

struct SimulationOptions {
  // Max number of stored field values over all J.
  std::uint64_t field_budget = std::uint64_t{1} << 26;
  // Max size of the configuration sweep 2^N_effective.
  std::uint64_t sweep_budget = std::uint64_t{1} << 34;
  // Fixed number of sweep blocks; fixes the reduction order.
  unsigned partitions = 64;
  // Worker threads; does not change results.
  unsigned threads = 1;
};

namespace detail {

// Extracts sigma_J from a packed configuration: the groups of J, in increasing order,
// are concatenated into a dense index.
class Projector {
 public:
  Projector(const SizeAssignment& size, SubsetMask subset, SubsetMask frame) {
    // frame: the groups present in the packed source index, in increasing order.
    int source_offset = 0;
    int target_offset = 0;
    for (int g : frame.groups()) {
      const int b = size.bits[static_cast<std::size_t>(g)];
      if (subset.contains(g)) {
        parts_.push_back({source_offset, (std::uint64_t{1} << b) - 1, target_offset});
        target_offset += b;
      }
      source_offset += b;
    }
  }

  std::uint64_t operator()(std::uint64_t packed) const noexcept {
    std::uint64_t index = 0;
    for (const auto& p : parts_) index |= ((packed >> p.source_shift) & p.mask) << p.target_shift;
    return index;
  }

 private:
  struct Part {
    int source_shift;
    std::uint64_t mask;
    int target_shift;
  };
  std::vector<Part> parts_;
};

// Runs work(block) for every block, spreading blocks over the given number of threads.
template <class Work>
void run_blocks(std::size_t blocks, unsigned threads, Work&& work) {
  threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(blocks)));
  if (threads == 1) {
    for (std::size_t b = 0; b < blocks; ++b) work(b);
    return;
  }
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      for (std::size_t b = t; b < blocks; b += threads) work(b);
    });
}

// Fixed-shape pairwise sum.
inline double pairwise_sum(std::span<const double> v) {
  if (v.empty()) return 0.0;
  if (v.size() == 1) return v[0];
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

}  // namespace detail

// Independent X^J_{sigma_J} ~ N(0, a_J N_effective) for every stored J and every sigma_J.
inline FieldRealization sample_fields(const ModelSpec& m, const SizeAssignment& size, std::uint64_t seed,
                                      const SimulationOptions& options = {}) {
  std::uint64_t total = 0;
  for (const auto& w : m.weights()) {
    const int b = size.bits_in(w.subset);
    if (b >= 63) throw Error(ErrorCode::BudgetExceeded, "field array for " + to_string(w.subset) + " too large");
    total += std::uint64_t{1} << b;
    if (total > options.field_budget)
      throw Error(ErrorCode::BudgetExceeded, "field arrays need more than " +
                                                 std::to_string(options.field_budget) + " values");
  }
  FieldRealization f;
  f.size = size;
  f.seed = seed;
  for (const auto& w : m.weights()) {
    FieldArray arr;
    arr.subset = w.subset;
    arr.variance = w.a * size.n_effective;
    arr.stream_seed = derive_seed(seed, w.subset.bits());
    arr.values.resize(std::size_t{1} << size.bits_in(w.subset));
    std::mt19937_64 engine(arr.stream_seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(arr.variance));
    for (double& x : arr.values) x = gauss(engine);
    f.fields.push_back(std::move(arr));
  }
  return f;
}

// Calls visit(packed sigma, X_sigma) for sigma in [lo, hi).
template <class Visit>
void for_each_energy(const FieldRealization& f, std::uint64_t lo, std::uint64_t hi, Visit&& visit) {
  const SubsetMask frame = SubsetMask::full(static_cast<int>(f.size.bits.size()));
  std::vector<detail::Projector> projectors;
  for (const auto& arr : f.fields) projectors.emplace_back(f.size, arr.subset, frame);
  for (std::uint64_t sigma = lo; sigma < hi; ++sigma) {
    double x = 0.0;
    for (std::size_t k = 0; k < projectors.size(); ++k) x += f.fields[k].values[projectors[k](sigma)];
    visit(sigma, x);
  }
}

// F_N(beta) = (1/N) log( 2^{-N} sum_sigma exp(beta X_sigma) ) with N = N_effective, for
// each beta. One streaming pass with a running max shift per block; blocks are combined
// in a fixed pairwise order.
inline std::vector<double> finite_free_energy(const FieldRealization& f, std::span<const double> betas,
                                              const SimulationOptions& options = {}) {
  for (double b : betas)
    if (!(b >= 0.0)) throw Error(ErrorCode::InvalidArgument, "beta must be nonnegative");
  const std::uint64_t configs = f.size.configurations();
  if (configs > options.sweep_budget)
    throw Error(ErrorCode::BudgetExceeded, "configuration sweep of 2^" + std::to_string(f.size.n_effective) +
                                               " states exceeds the sweep budget");
  const std::size_t blocks =
      static_cast<std::size_t>(std::min<std::uint64_t>(std::max(1U, options.partitions), configs));
  const std::size_t nb = betas.size();
  std::vector<double> block_max(blocks);
  std::vector<double> block_sums(blocks * nb);

  detail::run_blocks(blocks, options.threads, [&](std::size_t b) {
    const std::uint64_t lo = configs * b / blocks;
    const std::uint64_t hi = configs * (b + 1) / blocks;
    double running_max = -kInfinity;
    std::span<double> sums(block_sums.data() + b * nb, nb);
    std::fill(sums.begin(), sums.end(), 0.0);
    for_each_energy(f, lo, hi, [&](std::uint64_t, double x) {
      if (x > running_max) {
        for (std::size_t i = 0; i < nb; ++i)
          sums[i] = (running_max == -kInfinity ? 0.0 : sums[i] * std::exp(betas[i] * (running_max - x))) + 1.0;
        running_max = x;
      } else {
        for (std::size_t i = 0; i < nb; ++i) sums[i] += std::exp(betas[i] * (x - running_max));
      }
    });
    block_max[b] = running_max;
  });

  const double global_max = *std::max_element(block_max.begin(), block_max.end());
  const double n_eff = f.size.n_effective;
  std::vector<double> out(nb);
  std::vector<double> shifted(blocks);
  for (std::size_t i = 0; i < nb; ++i) {
    for (std::size_t b = 0; b < blocks; ++b)
      shifted[b] = block_sums[b * nb + i] * std::exp(betas[i] * (block_max[b] - global_max));
    const double total = detail::pairwise_sum(shifted);
    out[i] = (betas[i] * global_max + std::log(std::ldexp(total, -f.size.n_effective))) / n_eff;
  }
  return out;
}

inline double finite_free_energy(const FieldRealization& f, double beta, const SimulationOptions& options = {}) {
  const double betas[] = {beta};
  return finite_free_energy(f, betas, options).front();
}

inline double max_energy(const FieldRealization& f) {
  double best = -kInfinity;
  for_each_energy(f, 0, f.size.configurations(), [&](std::uint64_t, double x) { best = std::max(best, x); });
  return best;
}

// ---------------------------------------------------------------------------
// Quenched estimates
// ---------------------------------------------------------------------------

struct QuenchedEstimate {
  double beta = 0.0;
  double mean_f = 0.0;
  double std_f = 0.0;  // sample standard deviation over replicas
  int replicas = 0;
  SizeAssignment size;
};

inline std::uint64_t replica_seed(std::uint64_t seed, int replica) noexcept {
  return derive_seed(seed, static_cast<std::uint64_t>(replica));
}

// Mean and spread of F_N(beta) over independent realizations, one per replica seed.
inline std::vector<QuenchedEstimate> estimate_quenched(const ModelSpec& m, int n_total, std::span<const double> betas,
                                                       int replicas, std::uint64_t seed,
                                                       const SimulationOptions& options = {}) {
  if (replicas < 2) throw Error(ErrorCode::InvalidArgument, "need at least two replicas");
  const SizeAssignment size = assign_sizes(m, n_total);
  std::vector<std::vector<double>> samples(betas.size());
  for (int r = 0; r < replicas; ++r) {
    const FieldRealization f = sample_fields(m, size, replica_seed(seed, r), options);
    const auto values = finite_free_energy(f, betas, options);
    for (std::size_t i = 0; i < betas.size(); ++i) samples[i].push_back(values[i]);
  }
  std::vector<QuenchedEstimate> out;
  for (std::size_t i = 0; i < betas.size(); ++i) {
    const auto& s = samples[i];
    const double mean = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
    double ss = 0.0;
    for (double v : s) ss += (v - mean) * (v - mean);
    out.push_back({betas[i], mean, std::sqrt(ss / static_cast<double>(s.size() - 1)), replicas, size});
  }
  return out;
}

inline QuenchedEstimate estimate_quenched(const ModelSpec& m, int n_total, double beta, int replicas,
                                          std::uint64_t seed, const SimulationOptions& options = {}) {
  const double betas[] = {beta};
  return estimate_quenched(m, n_total, betas, replicas, seed, options).front();
}

// ---------------------------------------------------------------------------
// Exceedance counts
// ---------------------------------------------------------------------------

// #{sigma in Sigma_{N,A} : X^J_{sigma_J} >= lambda_J N for all stored J ⊆ A}, N = N_effective.
inline std::uint64_t count_exceedances(const FieldRealization& f, SubsetMask a, const LambdaVector& lam) {
  if (lam.size() != f.fields.size()) throw Error(ErrorCode::InvalidArgument, "lambda does not match the fields");
  struct Check {
    detail::Projector projector;
    const std::vector<double>* values;
    double threshold;
  };
  std::vector<Check> checks;
  for (std::size_t k = 0; k < f.fields.size(); ++k) {
    const auto& arr = f.fields[k];
    if (!arr.subset.subset_of(a)) continue;
    checks.push_back({detail::Projector(f.size, arr.subset, a), &arr.values,
                      lam.values()[k] * f.size.n_effective});
  }
  const std::uint64_t configs = std::uint64_t{1} << f.size.bits_in(a);
  std::uint64_t count = 0;
  for (std::uint64_t sigma = 0; sigma < configs; ++sigma) {
    bool all = true;
    for (const auto& c : checks) {
      if (!((*c.values)[c.projector(sigma)] >= c.threshold)) {
        all = false;
        break;
      }
    }
    if (all) ++count;
  }
  return count;
}

// ---------------------------------------------------------------------------
// Covariance metric
// ---------------------------------------------------------------------------

// One value per group, sigma_i in [0, 2^{b_i}).
using Configuration = std::vector<std::uint64_t>;

inline SubsetMask disagreement(const Configuration& x, const Configuration& y) {
  if (x.size() != y.size()) throw Error(ErrorCode::InvalidArgument, "configurations of different length");
  SubsetMask d;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] != y[i]) d |= SubsetMask::single(static_cast<int>(i));
  return d;
}

// Sum of a_J over stored J meeting the disagreement set D.
inline double disagreement_weight(const ModelSpec& m, SubsetMask d) {
  double total = 0.0;
  for (const auto& w : m.weights())
    if (w.subset.intersects(d)) total += w.a;
  return total;
}

// d(sigma, sigma') = sqrt(E (X_sigma - X_sigma')^2) = sqrt(2 N sum_{J: sigma_J != sigma'_J} a_J).
inline double pair_distance(const ModelSpec& m, const SizeAssignment& size, const Configuration& x,
                            const Configuration& y) {
  if (x.size() != static_cast<std::size_t>(m.n()) || y.size() != static_cast<std::size_t>(m.n()))
    throw Error(ErrorCode::InvalidArgument, "configuration length must equal n");
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] >> size.bits[i] != 0 || y[i] >> size.bits[i] != 0)
      throw Error(ErrorCode::IndexOutOfRange, "configuration value outside its group range");
  const SubsetMask d = disagreement(x, y);
  if (d.empty()) return 0.0;
  return std::sqrt(2.0 * size.n_effective * disagreement_weight(m, d));
}

struct UltrametricWitness {
  Configuration x, y, z;
  double d_xy = 0.0, d_yz = 0.0, d_xz = 0.0;
};

// Largest n searched exhaustively over disagreement patterns.
inline constexpr int kUltrametricExhaustiveCap = 16;

// Looks for x, y, z with d(x,z) > max(d(x,y), d(y,z)). Only the disagreement pattern matters,
// and a violation survives replacing any group where all three differ (or x = z != y) by
// one where only x or only z differs, so the search covers the 3^n splits of I into
// {agree, only x differs, only z differs}.
inline std::optional<UltrametricWitness> find_ultrametric_violation(const ModelSpec& m, const SizeAssignment& size) {
  constexpr double kSlack = 1e-12;
  auto witness = [&](SubsetMask only_x, SubsetMask only_z) {
    UltrametricWitness w;
    const auto groups = static_cast<std::size_t>(m.n());
    w.x.assign(groups, 0);
    w.y.assign(groups, 0);
    w.z.assign(groups, 0);
    for (int g : only_x.groups()) w.x[static_cast<std::size_t>(g)] = 1;
    for (int g : only_z.groups()) w.z[static_cast<std::size_t>(g)] = 1;
    w.d_xy = pair_distance(m, size, w.x, w.y);
    w.d_yz = pair_distance(m, size, w.y, w.z);
    w.d_xz = pair_distance(m, size, w.x, w.z);
    return w;
  };

  if (m.n() > kUltrametricExhaustiveCap) {
    // Equivalent criterion: some pair of stored subsets is incomparable.
    for (const auto& p : m.weights())
      for (const auto& q : m.weights())
        if (!p.subset.subset_of(q.subset) && !q.subset.subset_of(p.subset))
          return witness(SubsetMask::single((p.subset - q.subset).groups().front()),
                         SubsetMask::single((q.subset - p.subset).groups().front()));
    return std::nullopt;
  }

  const SubsetMask universe = m.universe();
  std::vector<double> weight(std::size_t{1} << m.n());
  for_each_subset(universe, [&](SubsetMask d) { weight[d.bits()] = disagreement_weight(m, d); });
  std::optional<UltrametricWitness> found;
  for_each_strict_superset(SubsetMask{}, universe, [&](SubsetMask only_x) {
    if (found) return;
    for_each_strict_superset(SubsetMask{}, universe - only_x, [&](SubsetMask only_z) {
      if (found) return;
      const double wxz = weight[(only_x | only_z).bits()];
      if (wxz > std::max(weight[only_x.bits()], weight[only_z.bits()]) + kSlack) found = witness(only_x, only_z);
    });
  });
  return found;
}

// ---------------------------------------------------------------------------
// Realization dumps
// ---------------------------------------------------------------------------

// Writes all field arrays as raw native-endian doubles to `<prefix>.bin` and a text header
// to `<prefix>.txt` with one line per J: mask, indices, length, variance, seed, byte offset.
inline void write_realization(const FieldRealization& f, const std::string& prefix) {
  std::ofstream bin(prefix + ".bin", std::ios::binary);
  std::ofstream txt(prefix + ".txt");
  if (!bin || !txt) throw Error(ErrorCode::InvalidArgument, "cannot write realization to '" + prefix + "'");
  txt.precision(17);
  txt << "ngrem-realization 1\n";
  txt << "seed " << f.seed << "\n";
  txt << "n_effective " << f.size.n_effective << "\n";
  txt << "n_nominal " << f.size.n_nominal << "\n";
  txt << "bits";
  for (int b : f.size.bits) txt << ' ' << b;
  txt << "\nfields " << f.fields.size() << "\n";
  std::uint64_t offset = 0;
  for (const auto& arr : f.fields) {
    txt << arr.subset.bits() << ' ';
    const auto idx = arr.subset.indices();
    for (std::size_t i = 0; i < idx.size(); ++i) txt << (i ? "," : "") << idx[i];
    txt << ' ' << arr.values.size() << ' ' << arr.variance << ' ' << arr.stream_seed << ' ' << offset << "\n";
    bin.write(reinterpret_cast<const char*>(arr.values.data()),
              static_cast<std::streamsize>(arr.values.size() * sizeof(double)));
    offset += arr.values.size() * sizeof(double);
  }
}

inline FieldRealization read_realization(const std::string& prefix) {
  std::ifstream txt(prefix + ".txt");
  std::ifstream bin(prefix + ".bin", std::ios::binary);
  if (!txt || !bin) throw Error(ErrorCode::ParseError, "cannot read realization '" + prefix + "'");
  auto expect = [&](const std::string& word) {
    std::string got;
    txt >> got;
    if (got != word) throw Error(ErrorCode::ParseError, "realization header: expected '" + word + "'");
  };
  FieldRealization f;
  int version = 0;
  expect("ngrem-realization");
  txt >> version;
  expect("seed");
  txt >> f.seed;
  expect("n_effective");
  txt >> f.size.n_effective;
  expect("n_nominal");
  txt >> f.size.n_nominal;
  expect("bits");
  std::string line;
  std::getline(txt, line);
  std::istringstream bits_line(line);
  int offset = 0;
  for (int b; bits_line >> b;) {
    f.size.bits.push_back(b);
    f.size.offsets.push_back(offset);
    offset += b;
  }
  std::size_t count = 0;
  expect("fields");
  txt >> count;
  for (std::size_t k = 0; k < count; ++k) {
    FieldArray arr;
    SubsetMask::bits_type mask = 0;
    std::string indices;
    std::size_t length = 0;
    std::uint64_t byte_offset = 0;
    txt >> mask >> indices >> length >> arr.variance >> arr.stream_seed >> byte_offset;
    if (!txt) throw Error(ErrorCode::ParseError, "realization header: bad field line");
    arr.subset = SubsetMask(mask);
    arr.values.resize(length);
    bin.seekg(static_cast<std::streamoff>(byte_offset));
    bin.read(reinterpret_cast<char*>(arr.values.data()), static_cast<std::streamsize>(length * sizeof(double)));
    if (!bin) throw Error(ErrorCode::ParseError, "realization data truncated");
    f.fields.push_back(std::move(arr));
  }
  return f;
}

}  // namespace ngrem
