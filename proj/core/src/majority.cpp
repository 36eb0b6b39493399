#include "majlab/majority.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "majlab/rng.hpp"
#include "majlab/version.hpp"

namespace majlab {

SignVector::SignVector(std::vector<int8_t> bits) : bits_(std::move(bits)) {
  if (bits_.empty()) throw DomainError("SignVector: dimension must be >= 1");
  for (int8_t b : bits_) {
    if (b != 1 && b != -1) throw DomainError("SignVector: entries must be +-1");
  }
}

SignVector SignVector::all_positive(unsigned d) {
  return SignVector(std::vector<int8_t>(d, 1));
}

SignVector SignVector::first_m_negative(unsigned d, unsigned m) {
  if (m > d) throw DomainError("first_m_negative: m > d");
  std::vector<int8_t> bits(d, 1);
  for (unsigned i = 0; i < m; ++i) bits[i] = -1;
  return SignVector(std::move(bits));
}

SignVector SignVector::from_negative_mask(unsigned d, std::uint64_t mask) {
  std::vector<int8_t> bits(d, 1);
  for (unsigned i = 0; i < d; ++i) {
    if ((mask >> i) & 1u) bits[i] = -1;
  }
  return SignVector(std::move(bits));
}

unsigned SignVector::count_negative() const {
  unsigned m = 0;
  for (int8_t b : bits_) m += (b < 0);
  return m;
}

Support::Support(std::vector<unsigned> indices, unsigned d)
    : indices_(std::move(indices)), d_(d) {
  if (indices_.empty()) throw DomainError("Support: k must be >= 1");
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (indices_[i] < 1 || indices_[i] > d_)
      throw DomainError("Support: index out of [1,d]");
    if (i > 0 && indices_[i] <= indices_[i - 1])
      throw DomainError("Support: indices must be strictly increasing");
  }
}

Support Support::complement() const {
  std::vector<unsigned> rest;
  rest.reserve(d_ - indices_.size());
  std::size_t p = 0;
  for (unsigned j = 1; j <= d_; ++j) {
    if (p < indices_.size() && indices_[p] == j) {
      ++p;
    } else {
      rest.push_back(j);
    }
  }
  return Support(std::move(rest), d_);
}

Support Support::cyclic_shift() const {
  std::vector<unsigned> shifted;
  shifted.reserve(indices_.size());
  for (unsigned j : indices_) shifted.push_back(j % d_ + 1);
  std::sort(shifted.begin(), shifted.end());
  return Support(std::move(shifted), d_);
}

int maj(const SignVector& x, const Support& s) {
  if (s.d() != x.dim()) throw DimensionMismatch("maj: support dimension != input dimension");
  int sum = 0;
  for (unsigned j : s.indices()) sum += x[j - 1];
  return sum >= 0 ? 1 : -1;
}

int par(const SignVector& x, const Support& s) {
  if (s.d() != x.dim()) throw DimensionMismatch("par: support dimension != input dimension");
  int prod = 1;
  for (unsigned j : s.indices()) prod *= x[j - 1];
  return prod;
}

LabeledDataset sample_dataset(unsigned d, unsigned k, std::size_t n,
                              const Support& support, std::uint64_t seed) {
  if (n == 0) throw DomainError("sample_dataset: n must be >= 1");
  if (support.d() != d || support.k() != k)
    throw DimensionMismatch("sample_dataset: support does not match (d,k)");
  const CounterRng rng(seed, CounterRng::kDatasetBits);
  LabeledDataset data{.inputs = {}, .support = support, .labels = {}, .seed = seed};
  data.inputs.reserve(n);
  data.labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<int8_t> bits(d);
    for (unsigned j = 0; j < d; ++j) {
      bits[j] = static_cast<int8_t>(rng.sign(static_cast<std::uint64_t>(i) * d + j));
    }
    SignVector x(std::move(bits));
    data.labels.push_back(static_cast<int8_t>(maj(x, support)));
    data.inputs.push_back(std::move(x));
  }
  return data;
}

double empirical_inner(const Predictor& f, const Predictor& g,
                       const LabeledDataset& data) {
  double acc = 0.0;
  for (const auto& x : data.inputs) acc += f(x) * g(x);
  return acc / static_cast<double>(data.n());
}

double empirical_norm_sq(const Predictor& f, const LabeledDataset& data) {
  return empirical_inner(f, f, data);
}

double empirical_loss(const Predictor& pred, const LabeledDataset& data) {
  double acc = 0.0;
  for (std::size_t i = 0; i < data.n(); ++i) {
    const double r = static_cast<double>(data.labels[i]) - pred(data.inputs[i]);
    acc += r * r;
  }
  return acc / (2.0 * static_cast<double>(data.n()));
}

MseEstimate population_mse_exact(const Predictor& pred, const Support& s) {
  const unsigned d = s.d();
  if (d > 20) throw ExactTooLarge("population_mse_exact: d > 20");
  const std::uint64_t total = 1ULL << d;
  double acc = 0.0;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    const SignVector x = SignVector::from_negative_mask(d, mask);
    const double r = static_cast<double>(maj(x, s)) - pred(x);
    acc += r * r;
  }
  return MseEstimate{.value = acc / static_cast<double>(total),
                     .exact = true,
                     .std_error = 0.0,
                     .samples = total};
}

MseEstimate population_mse_monte_carlo(const Predictor& pred, const Support& s,
                                       std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw DomainError("population_mse_monte_carlo: samples must be >= 1");
  const unsigned d = s.d();
  const CounterRng rng(seed, CounterRng::kMonteCarlo);
  double acc = 0.0;
  double acc_sq = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    std::vector<int8_t> bits(d);
    for (unsigned j = 0; j < d; ++j) {
      bits[j] = static_cast<int8_t>(rng.sign(static_cast<std::uint64_t>(i) * d + j));
    }
    const SignVector x(std::move(bits));
    const double r = static_cast<double>(maj(x, s)) - pred(x);
    acc += r * r;
    acc_sq += r * r * r * r;
  }
  const double mean = acc / static_cast<double>(samples);
  const double var = std::max(0.0, acc_sq / static_cast<double>(samples) - mean * mean);
  return MseEstimate{.value = mean,
                     .exact = false,
                     .std_error = std::sqrt(var / static_cast<double>(samples)),
                     .samples = samples};
}

double clip(double v) { return std::min(std::max(v, -1.0), 1.0); }

namespace {

void enumerate_supports_rec(unsigned d, unsigned k, unsigned start,
                            std::vector<unsigned>& cur,
                            const std::function<void(const std::vector<unsigned>&)>& emit) {
  if (cur.size() == k) {
    emit(cur);
    return;
  }
  const unsigned remaining = k - static_cast<unsigned>(cur.size());
  for (unsigned j = start; j + remaining <= d + 1; ++j) {
    cur.push_back(j);
    enumerate_supports_rec(d, k, j + 1, cur, emit);
    cur.pop_back();
  }
}

} // namespace

std::vector<ComplementViolation> complement_identity_check(unsigned d, unsigned k) {
  if (d > 14) throw CapExceeded("complement_identity_check: d > 14");
  if (k < 1 || k >= d) throw DomainError("complement_identity_check: need 1 <= k <= d-1");
  std::vector<ComplementViolation> violations;
  std::vector<unsigned> cur;
  enumerate_supports_rec(d, k, 1, cur, [&](const std::vector<unsigned>& idx) {
    const Support s(idx, d);
    const Support sc = s.complement();
    for (std::uint64_t mask = 0; mask < (1ULL << d); ++mask) {
      const SignVector x = SignVector::from_negative_mask(d, mask);
      int prod = 1;
      for (unsigned j = 0; j < d; ++j) prod *= x[j];
      if (maj(x, s) != prod * maj(x, sc)) {
        violations.push_back(ComplementViolation{x, s});
      }
    }
  });
  return violations;
}

void write_dataset(std::ostream& out, const LabeledDataset& data) {
  out << "# " << kLibraryName << " v" << kLibraryVersion
      << " schema=" << kSchemaVersion << "\n";
  out << data.d() << "," << data.k() << "," << data.seed << "\n";
  const auto& idx = data.support.indices();
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (i) out << ",";
    out << idx[i];
  }
  out << "\n";
  for (std::size_t i = 0; i < data.n(); ++i) {
    for (unsigned j = 0; j < data.d(); ++j) out << (data.inputs[i][j] > 0 ? '+' : '-');
    out << "," << (data.labels[i] > 0 ? "+1" : "-1") << "\n";
  }
}

LabeledDataset read_dataset(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0)
    throw DomainError("read_dataset: missing schema comment");
  if (!std::getline(in, line)) throw DomainError("read_dataset: missing header");
  unsigned d = 0, k = 0;
  std::uint64_t seed = 0;
  {
    std::istringstream hs(line);
    char c1 = 0, c2 = 0;
    if (!(hs >> d >> c1 >> k >> c2 >> seed) || c1 != ',' || c2 != ',')
      throw DomainError("read_dataset: malformed header line");
  }
  if (!std::getline(in, line)) throw DomainError("read_dataset: missing support line");
  std::vector<unsigned> idx;
  {
    std::istringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) idx.push_back(static_cast<unsigned>(std::stoul(tok)));
  }
  Support support(idx, d);
  if (support.k() != k) throw DomainError("read_dataset: support size != k");
  LabeledDataset data{.inputs = {}, .support = support, .labels = {}, .seed = seed};
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || comma != d)
      throw DomainError("read_dataset: malformed record");
    std::vector<int8_t> bits(d);
    for (unsigned j = 0; j < d; ++j) {
      if (line[j] == '+') {
        bits[j] = 1;
      } else if (line[j] == '-') {
        bits[j] = -1;
      } else {
        throw DomainError("read_dataset: bad bit character");
      }
    }
    const std::string lab = line.substr(comma + 1);
    int8_t y = 0;
    if (lab == "+1") {
      y = 1;
    } else if (lab == "-1") {
      y = -1;
    } else {
      throw DomainError("read_dataset: bad label");
    }
    SignVector x(std::move(bits));
    if (maj(x, support) != y) throw DomainError("read_dataset: label inconsistent with support");
    data.inputs.push_back(std::move(x));
    data.labels.push_back(y);
  }
  if (data.inputs.empty()) throw DomainError("read_dataset: empty dataset");
  return data;
}

void save_dataset(const std::string& path, const LabeledDataset& data) {
  std::ostringstream buf;
  write_dataset(buf, data);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("save_dataset: cannot open " + path);
  f << buf.str();
}

LabeledDataset load_dataset(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("load_dataset: cannot open " + path);
  return read_dataset(f);
}

} // namespace majlab
