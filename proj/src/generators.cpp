#include "nystrom/generators.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "nystrom/analysis.hpp"
#include "nystrom/sampling.hpp"

namespace nystrom {

namespace {

double parse_double(std::string_view text, const std::string& context) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw std::invalid_argument("cannot parse number '" + std::string(text) + "' in " + context);
  }
  return value;
}

std::string shortest(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

// Independent sub-stream of a seed, one per purpose.
RngSeed substream(const RngSeed& seed, std::uint64_t purpose) { return {stream_key(seed), purpose}; }

Matrix hadamard(Index n) {
  Matrix h = Matrix::Ones(1, 1);
  while (h.rows() < n) {
    const Index m = h.rows();
    Matrix next(2 * m, 2 * m);
    next << h, h, h, -h;
    h = std::move(next);
  }
  return h / std::sqrt(static_cast<double>(n));
}

}  // namespace

SpectrumSpec SpectrumSpec::parse(const std::string& text, Index n, Index k, double lambda1) {
  SpectrumSpec spec;
  spec.n = n;
  spec.k = k;
  spec.lambda1 = lambda1;
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string tail = colon == std::string::npos ? "" : text.substr(colon + 1);

  if (head == "exact") {
    spec.kind = Kind::exact_rank;
  } else if (head == "exp") {
    spec.kind = Kind::exponential;
    spec.parameter = parse_double(tail, "spectrum '" + text + "'");
  } else if (head == "power") {
    spec.kind = Kind::power_law;
    spec.parameter = parse_double(tail, "spectrum '" + text + "'");
  } else if (head == "custom") {
    spec.kind = Kind::custom;
    std::stringstream ss(tail);
    std::string item;
    while (std::getline(ss, item, ',')) spec.custom.push_back(parse_double(item, "spectrum '" + text + "'"));
  } else {
    throw std::invalid_argument("unknown spectrum '" + text + "' (expected exact, exp:<r>, power:<a>, custom:<list>)");
  }
  return spec;
}

std::string SpectrumSpec::to_string() const {
  switch (kind) {
    case Kind::exact_rank:
      return "exact";
    case Kind::exponential:
      return "exp:" + shortest(parameter);
    case Kind::power_law:
      return "power:" + shortest(parameter);
    case Kind::custom: {
      std::string out = "custom:";
      for (std::size_t i = 0; i < custom.size(); ++i) out += (i ? "," : "") + shortest(custom[i]);
      return out;
    }
  }
  return {};
}

Vector spectrum_values(const SpectrumSpec& spec) {
  if (spec.n < 1) throw std::invalid_argument("spectrum: n must be >= 1");
  if (spec.k < 1 || spec.k > spec.n) throw std::invalid_argument("spectrum: k must lie in [1, n]");
  if (!(spec.lambda1 > 0.0) || !std::isfinite(spec.lambda1)) throw std::invalid_argument("spectrum: lambda1 must be positive");

  Vector out(spec.n);
  switch (spec.kind) {
    case SpectrumSpec::Kind::exact_rank:
      for (Index j = 0; j < spec.n; ++j) {
        out(j) = j < spec.k ? spec.lambda1 * static_cast<double>(spec.k - j) / static_cast<double>(spec.k) : 0.0;
      }
      break;
    case SpectrumSpec::Kind::exponential:
      if (!(spec.parameter > 0.0 && spec.parameter <= 1.0)) {
        throw std::invalid_argument("spectrum: exponential rate must lie in (0, 1]");
      }
      for (Index j = 0; j < spec.n; ++j) out(j) = spec.lambda1 * std::pow(spec.parameter, static_cast<double>(j));
      break;
    case SpectrumSpec::Kind::power_law:
      if (!(spec.parameter >= 0.0)) throw std::invalid_argument("spectrum: power-law exponent must be >= 0");
      for (Index j = 0; j < spec.n; ++j) out(j) = spec.lambda1 * std::pow(static_cast<double>(j + 1), -spec.parameter);
      break;
    case SpectrumSpec::Kind::custom:
      if (static_cast<Index>(spec.custom.size()) != spec.n) {
        throw std::invalid_argument("spectrum: custom list has " + std::to_string(spec.custom.size()) +
                                    " values, expected " + std::to_string(spec.n));
      }
      for (Index j = 0; j < spec.n; ++j) out(j) = spec.custom[static_cast<std::size_t>(j)];
      break;
  }
  for (Index j = 0; j < spec.n; ++j) {
    if (out(j) < 0.0 || (j > 0 && out(j) > out(j - 1))) {
      throw std::invalid_argument("spectrum must be non-negative and non-increasing");
    }
  }
  return out;
}

CoherencePlan CoherencePlan::parse(const std::string& text) {
  if (text == "low") return {Kind::low, 0};
  if (text == "flat") return {Kind::flat, 0};
  if (text.rfind("spiked:", 0) == 0) {
    const std::string tail = text.substr(7);
    Index m = 0;
    const auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), m);
    if (ec != std::errc() || ptr != tail.data() + tail.size() || m < 1) {
      throw std::invalid_argument("coherence plan '" + text + "': spike count must be a positive integer");
    }
    return {Kind::spiked, m};
  }
  throw std::invalid_argument("unknown coherence plan '" + text + "' (expected low, flat, spiked:<m>)");
}

std::string CoherencePlan::to_string() const {
  switch (kind) {
    case Kind::low:
      return "low";
    case Kind::flat:
      return "flat";
    case Kind::spiked:
      return "spiked:" + std::to_string(spikes);
  }
  return {};
}

Matrix random_orthonormal(Index n, Index k, const RngSeed& seed) {
  if (n < 0 || k < 0 || k > n) throw std::invalid_argument("random_orthonormal: need 0 <= k <= n");
  if (k == 0) return Matrix(n, 0);
  Rng rng(seed);
  Matrix g(n, k);
  for (Index j = 0; j < k; ++j) {
    for (Index i = 0; i < n; ++i) g(i, j) = rng.normal();
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, k);
  for (Index j = 0; j < k; ++j) {
    if (qr.matrixQR()(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

SymMatrix psd_from_spectrum(const Matrix& u, const Vector& lambdas) {
  const Index n = u.rows();
  if (n < 1 || u.cols() != n) throw std::invalid_argument("psd_from_spectrum: U must be square");
  if (lambdas.size() != n) throw std::invalid_argument("psd_from_spectrum: spectrum length must equal n");
  for (Index j = 0; j < n; ++j) {
    if (!(lambdas(j) >= 0.0) || (j > 0 && lambdas(j) > lambdas(j - 1))) {
      throw std::invalid_argument("psd_from_spectrum: spectrum must be non-negative and non-increasing");
    }
  }
  const double deviation = orthonormality_error(u);
  if (deviation > 1e-8) {
    throw std::invalid_argument("psd_from_spectrum: U is not orthogonal (deviation " + std::to_string(deviation) + ")");
  }
  const Matrix half = u * lambdas.cwiseSqrt().asDiagonal();
  Matrix a = Matrix::Zero(n, n);
  a.selfadjointView<Eigen::Lower>().rankUpdate(half);
  a = a.selfadjointView<Eigen::Lower>();
  return SymMatrix(a);
}

PlantedInstance planted_instance(const SpectrumSpec& spec, const CoherencePlan& plan, const RngSeed& seed) {
  const Vector lambdas = spectrum_values(spec);
  const Index n = spec.n;
  const Index k = spec.k;

  Matrix u(n, n);
  switch (plan.kind) {
    case CoherencePlan::Kind::low:
      u = random_orthonormal(n, n, substream(seed, 1));
      break;
    case CoherencePlan::Kind::spiked: {
      const Index m = plan.spikes;
      if (m < 1 || m > k) throw std::invalid_argument("spiked coherence plan needs 1 <= m <= k");
      const ColumnSample spikes = sample_uniform(n, m, substream(seed, 2));
      std::vector<bool> taken(static_cast<std::size_t>(n), false);
      u.setZero();
      for (Index j = 0; j < m; ++j) {
        const Index row = spikes.indices()[static_cast<std::size_t>(j)];
        u(row, j) = 1.0;
        taken[static_cast<std::size_t>(row)] = true;
      }
      std::vector<Index> rest;
      for (Index i = 0; i < n; ++i) {
        if (!taken[static_cast<std::size_t>(i)]) rest.push_back(i);
      }
      const Matrix q = random_orthonormal(n - m, n - m, substream(seed, 1));
      u(rest, Eigen::seq(m, n - 1)) = q;
      break;
    }
    case CoherencePlan::Kind::flat: {
      if ((n & (n - 1)) != 0) throw std::invalid_argument("flat coherence plan needs n to be a power of two");
      const Matrix h = hadamard(n);
      const ColumnSample order = sample_uniform(n, n, substream(seed, 2));
      const std::vector<Index>& idx = order.indices();
      const std::vector<Index> top(idx.begin(), idx.begin() + k);
      const std::vector<Index> bottom(idx.begin() + k, idx.end());
      u.leftCols(k) = h(Eigen::all, top) * random_orthonormal(k, k, substream(seed, 1));
      if (k < n) u.rightCols(n - k) = h(Eigen::all, bottom) * random_orthonormal(n - k, n - k, substream(seed, 3));
      break;
    }
  }

  SymMatrix a = psd_from_spectrum(u, lambdas);
  SpectralPartition p;
  p.u1 = u.leftCols(k);
  p.u2 = u.rightCols(n - k);
  p.sigma1 = lambdas.head(k);
  p.sigma2 = lambdas.tail(n - k);
  p.degenerate = k < n && lambdas(k - 1) == lambdas(k);
  const double tau = coherence(p.u1);
  return PlantedInstance{std::move(a), std::move(p), tau};
}

}  // namespace nystrom
