#include "qnc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace qnc {

namespace {

std::vector<Cx> random_amplitudes(size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<Cx> v(dim);
  double n2 = 0;
  for (Cx& a : v) {
    a = Cx(g(rng), g(rng));
    n2 += std::norm(a);
  }
  for (Cx& a : v) a /= std::sqrt(n2);
  return v;
}

std::vector<uint32_t> random_coeffs(size_t n, uint32_t p, std::mt19937_64& rng) {
  std::vector<uint32_t> c(n);
  for (uint32_t& v : c) v = uint32_t(rng() % p);
  return c;
}

uint32_t dot_digits(const std::vector<uint32_t>& c, size_t x, uint32_t p) {
  uint64_t acc = 0;
  for (uint32_t ci : c) {
    acc += uint64_t(ci) * (x % p);
    x /= p;
  }
  return uint32_t(acc % p);
}

}  // namespace

OracleReport check_functional_readout(uint32_t p, size_t max_regs, size_t instances,
                                      uint64_t seed) {
  OracleReport rep;
  std::seed_seq ss{uint32_t(seed), uint32_t(seed >> 32), p, 0x6f726131u};
  std::mt19937_64 rng(ss);

  for (size_t inst = 0; inst < instances; ++inst) {
    size_t n = 1 + inst % max_regs;
    size_t dim = pow_sz(p, n);
    std::vector<Cx> alpha = random_amplitudes(dim, rng);
    std::vector<uint32_t> g = random_coeffs(n, p, rng);

    std::vector<Cx> amps(dim * p, Cx{0, 0});
    for (size_t x = 0; x < dim; ++x) amps[x + dim * dot_digits(g, x, p)] = alpha[x];

    bool bad = false;
    for (uint32_t y = 0; y < p; ++y) {
      StateVector s = StateVector::with_amplitudes(p, n + 1, amps);
      int ancilla = s.handles().back();
      s.measure_forced(ancilla, Basis::fourier, y);
      s.discard(ancilla);

      double err = 0;
      for (size_t x = 0; x < dim; ++x) {
        Cx expected =
            alpha[x] * root_of_unity(p, -int64_t(y) * dot_digits(g, x, p));
        err = std::max(err, std::abs(s.amplitudes()[x] - expected));
      }
      rep.checks += 1;
      rep.max_error = std::max(rep.max_error, err);
      bad = bad || err > kTol;
    }
    rep.instances += 1;
    rep.failures += bad;
  }
  return rep;
}

OracleReport check_phase_cancellation(uint32_t p, size_t max_regs, size_t instances,
                                      uint64_t seed) {
  OracleReport rep;
  std::seed_seq ss{uint32_t(seed), uint32_t(seed >> 32), p, 0x6f726132u};
  std::mt19937_64 rng(ss);

  for (size_t inst = 0; inst < instances; ++inst) {
    size_t n = 1 + inst % max_regs;
    size_t dim = pow_sz(p, n);
    std::vector<Cx> alpha = random_amplitudes(dim, rng);
    std::vector<uint32_t> b = random_coeffs(n, p, rng);

    std::vector<Cx> amps(dim);
    for (size_t x = 0; x < dim; ++x)
      amps[x] = alpha[x] * root_of_unity(p, dot_digits(b, x, p));

    StateVector s = StateVector::with_amplitudes(p, n, amps);
    std::vector<int> handles = s.handles();
    for (size_t i = 0; i < n; ++i) s.apply_phase(handles[i], (p - b[i]) % p);

    double err = 0;
    for (size_t x = 0; x < dim; ++x)
      err = std::max(err, std::abs(s.amplitudes()[x] - alpha[x]));
    rep.checks += 1;
    rep.max_error = std::max(rep.max_error, err);
    rep.instances += 1;
    rep.failures += err > kTol;
  }
  return rep;
}

OracleReport check_code_exhaustive(const LinearCode& code, size_t cap) {
  size_t dim = pow_sz(code.p, code.rate);
  if (dim > cap)
    fail(Errc::size_budget, "exhaustive decode would try " + std::to_string(dim) +
                                " inputs, above the cap of " + std::to_string(cap));

  OracleReport rep;
  for (size_t x = 0; x < dim; ++x) {
    FVec a(code.rate, FieldElem(0, code.p));
    size_t rest = x;
    for (size_t k = 0; k < code.rate; ++k) {
      a[k] = FieldElem(rest % code.p, code.p);
      rest /= code.p;
    }
    std::vector<FVec> decoded = classical_simulate(code, a);
    rep.instances += 1;
    bool bad = false;
    for (const FVec& d : decoded) {
      rep.checks += 1;
      bad = bad || d != a;
    }
    rep.failures += bad;
  }
  return rep;
}

std::vector<TargetSelection> all_selections(const Network& net) {
  size_t h = net.sources.size();
  size_t t = net.targets.size();
  std::vector<TargetSelection> out;
  if (h > t) return out;

  std::vector<size_t> combo(h);
  std::iota(combo.begin(), combo.end(), size_t{0});
  while (true) {
    std::vector<std::string> nodes;
    for (size_t i : combo) nodes.push_back(net.targets[i]);
    std::vector<size_t> perm(h);
    std::iota(perm.begin(), perm.end(), size_t{0});
    do {
      out.push_back({nodes, perm});
    } while (std::next_permutation(perm.begin(), perm.end()));

    // advance the combination in lexicographic order
    size_t i = h;
    while (i > 0 && combo[i - 1] == t - h + (i - 1)) --i;
    if (i == 0) break;
    ++combo[i - 1];
    for (size_t j = i; j < h; ++j) combo[j] = combo[j - 1] + 1;
  }
  return out;
}

FidelityReport end_to_end_sweep(const Network& net,
                                const std::vector<uint64_t>& meas_seeds,
                                const std::vector<std::vector<Cx>>& inputs,
                                double threshold) {
  FidelityReport rep;
  for (const TargetSelection& sel : all_selections(net))
    for (uint64_t ms : meas_seeds)
      for (const std::vector<Cx>& in : inputs) {
        RunOptions opt;
        opt.meas_seed = ms;
        opt.selection = sel;
        opt.input = in;
        RunSummary sum = run_protocol(net, opt);
        rep.runs += 1;
        rep.min_fidelity = std::min(rep.min_fidelity, sum.fidelity);
        rep.transmissions = sum.transmissions;
        rep.failures += sum.fidelity < threshold;
      }
  return rep;
}

}  // namespace qnc
