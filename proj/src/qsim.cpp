#include "qnc/qsim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "qnc/gf.hpp"

namespace qnc {

namespace {
constexpr size_t kDefaultAmpBudget = size_t{1} << 20;
}

std::string RegisterLabel::display() const {
  switch (role) {
    case Role::input: return "S" + std::to_string(a + 1);
    case Role::source_half: return "S'" + std::to_string(a + 1);
    case Role::edge: return "R" + std::to_string(a + 1);
    case Role::target_out: return "T" + std::to_string(a + 1) + "." + std::to_string(b + 1);
    case Role::scratch: break;
  }
  return "q" + std::to_string(a);
}

double uniform01(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

Cx root_of_unity(uint32_t p, int64_t k) {
  int64_t r = k % p;
  if (r < 0) r += p;
  return std::polar(1.0, 2.0 * std::numbers::pi * double(r) / double(p));
}

size_t pow_sz(uint32_t p, size_t n) {
  size_t out = 1;
  for (size_t i = 0; i < n; ++i) {
    if (out > (size_t{1} << 40) / p) fail(Errc::size_budget, "state would be astronomically large");
    out *= p;
  }
  return out;
}

StateVector::StateVector(uint32_t p, size_t n, size_t max_registers)
    : p_(p), n_(0), max_registers_(max_registers) {
  if (!is_prime(p)) fail(Errc::not_prime, "register dimension must be prime");
  if (max_registers_ == 0) {
    max_registers_ = 0;
    while (pow_sz(p, max_registers_ + 1) <= kDefaultAmpBudget) ++max_registers_;
  }
  if (n > max_registers_)
    fail(Errc::size_budget, std::to_string(n) + " registers exceed the budget of " +
                                std::to_string(max_registers_));
  amps_.assign(pow_sz(p, n), Cx{0, 0});
  amps_[0] = 1.0;
  for (size_t i = 0; i < n; ++i) {
    pos_of_.push_back(static_cast<int>(i));
    handle_at_.push_back(static_cast<int>(i));
    labels_.push_back({"", Role::scratch, static_cast<int>(i), 0});
  }
  n_ = n;
}

StateVector StateVector::with_amplitudes(uint32_t p, size_t n, std::vector<Cx> amps,
                                         size_t max_registers) {
  StateVector s(p, n, max_registers);
  if (amps.size() != s.amps_.size())
    fail(Errc::schema_violation, "amplitude list has wrong length");
  double norm = 0;
  for (const auto& a : amps) norm += std::norm(a);
  if (std::abs(norm - 1.0) > 1e-6)
    fail(Errc::not_normalized, "amplitudes are not normalized");
  double scale = 1.0 / std::sqrt(norm);
  for (auto& a : amps) a *= scale;
  s.amps_ = std::move(amps);
  return s;
}

void StateVector::bump_size_check(size_t new_n) const {
  if (new_n > max_registers_)
    fail(Errc::size_budget, "register budget of " + std::to_string(max_registers_) + " exceeded");
}

int StateVector::add_register(const RegisterLabel& label) {
  bump_size_check(n_ + 1);
  size_t old = amps_.size();
  amps_.resize(old * p_, Cx{0, 0});  // new most-significant digit = 0
  int handle = static_cast<int>(pos_of_.size());
  pos_of_.push_back(static_cast<int>(n_));
  handle_at_.push_back(handle);
  labels_.push_back(label);
  ++n_;
  return handle;
}

std::vector<int> StateVector::handles() const { return handle_at_; }

bool StateVector::live(int handle) const {
  return handle >= 0 && handle < static_cast<int>(pos_of_.size()) && pos_of_[handle] >= 0;
}

size_t StateVector::pos_checked(int handle, const char* what) const {
  if (!live(handle))
    fail(Errc::bad_register, std::string(what) + ": register handle " + std::to_string(handle) +
                                 " is not live");
  return static_cast<size_t>(pos_of_[handle]);
}

size_t StateVector::position(int handle) const { return pos_checked(handle, "position"); }

const RegisterLabel& StateVector::label(int handle) const {
  if (handle < 0 || handle >= static_cast<int>(labels_.size()))
    fail(Errc::bad_register, "unknown register handle");
  return labels_[handle];
}

void StateVector::set_label(int handle, const RegisterLabel& label) {
  if (handle < 0 || handle >= static_cast<int>(labels_.size()))
    fail(Errc::bad_register, "unknown register handle");
  labels_[handle] = label;
}

void StateVector::apply_fourier(int reg, bool inverse) {
  size_t r = pos_checked(reg, "apply_fourier");
  size_t stride = pow_sz(p_, r);
  size_t block = stride * p_;
  double scale = 1.0 / std::sqrt(double(p_));
  std::vector<Cx> kernel(p_ * p_);
  for (uint32_t y = 0; y < p_; ++y)
    for (uint32_t x = 0; x < p_; ++x)
      kernel[y * p_ + x] = root_of_unity(p_, (inverse ? -1 : 1) * int64_t(x) * y) * scale;
  std::vector<Cx> fiber(p_);
  for (size_t base = 0; base < amps_.size(); base += block) {
    for (size_t lo = 0; lo < stride; ++lo) {
      for (uint32_t v = 0; v < p_; ++v) fiber[v] = amps_[base + lo + v * stride];
      for (uint32_t y = 0; y < p_; ++y) {
        Cx acc{0, 0};
        for (uint32_t x = 0; x < p_; ++x) acc += kernel[y * p_ + x] * fiber[x];
        amps_[base + lo + y * stride] = acc;
      }
    }
  }
  check_norm();
}

void StateVector::apply_phase(int reg, uint32_t b) {
  size_t r = pos_checked(reg, "apply_phase");
  size_t stride = pow_sz(p_, r);
  std::vector<Cx> w(p_);
  for (uint32_t v = 0; v < p_; ++v) w[v] = root_of_unity(p_, int64_t(b) * v);
  for (size_t x = 0; x < amps_.size(); ++x) amps_[x] *= w[(x / stride) % p_];
  check_norm();
}

void StateVector::apply_shift(int reg, uint32_t c) {
  size_t r = pos_checked(reg, "apply_shift");
  c %= p_;
  if (c == 0) return;
  size_t stride = pow_sz(p_, r);
  size_t block = stride * p_;
  std::vector<Cx> fiber(p_);
  for (size_t base = 0; base < amps_.size(); base += block) {
    for (size_t lo = 0; lo < stride; ++lo) {
      for (uint32_t v = 0; v < p_; ++v) fiber[v] = amps_[base + lo + v * stride];
      for (uint32_t v = 0; v < p_; ++v) amps_[base + lo + ((v + c) % p_) * stride] = fiber[v];
    }
  }
  check_norm();
}

void StateVector::apply_controlled_add(int control, int target, uint32_t gamma) {
  size_t pc = pos_checked(control, "apply_controlled_add");
  size_t pt = pos_checked(target, "apply_controlled_add");
  if (pc == pt) fail(Errc::control_equals_target, "controlled add needs two distinct registers");
  gamma %= p_;
  if (gamma == 0) return;
  size_t sc = pow_sz(p_, pc), st = pow_sz(p_, pt);
  scratch_.assign(amps_.size(), Cx{0, 0});
  for (size_t x = 0; x < amps_.size(); ++x) {
    uint32_t dc = (x / sc) % p_;
    uint32_t dt = (x / st) % p_;
    uint32_t nt = (dt + gamma * dc) % p_;
    scratch_[x + (size_t(nt) - dt) * st] = amps_[x];
  }
  amps_.swap(scratch_);
  check_norm();
}

std::vector<double> StateVector::marginals(size_t pos) const {
  size_t stride = pow_sz(p_, pos);
  std::vector<double> prob(p_, 0.0);
  for (size_t x = 0; x < amps_.size(); ++x) prob[(x / stride) % p_] += std::norm(amps_[x]);
  return prob;
}

void StateVector::collapse(size_t pos, uint32_t value, double prob) {
  size_t stride = pow_sz(p_, pos);
  double scale = 1.0 / std::sqrt(prob);
  for (size_t x = 0; x < amps_.size(); ++x)
    amps_[x] = ((x / stride) % p_) == value ? amps_[x] * scale : Cx{0, 0};
}

uint32_t StateVector::measure(int reg, Basis basis, std::mt19937_64& rng) {
  size_t pos = pos_checked(reg, "measure");
  if (basis == Basis::fourier) apply_fourier(reg, /*inverse=*/true);
  std::vector<double> prob = marginals(pos);
  double u = uniform01(rng);
  uint32_t value = p_ - 1;
  double acc = 0;
  for (uint32_t v = 0; v < p_; ++v) {
    acc += prob[v];
    if (u < acc) {
      value = v;
      break;
    }
  }
  collapse(pos, value, prob[value]);
  check_norm();
  return value;
}

uint32_t StateVector::measure_forced(int reg, Basis basis, uint32_t outcome) {
  size_t pos = pos_checked(reg, "measure_forced");
  if (outcome >= p_) fail(Errc::impossible_outcome, "forced outcome out of range");
  if (basis == Basis::fourier) apply_fourier(reg, /*inverse=*/true);
  std::vector<double> prob = marginals(pos);
  if (prob[outcome] <= kProbFloor)
    fail(Errc::impossible_outcome,
         "forced outcome " + std::to_string(outcome) + " has probability ~0");
  collapse(pos, outcome, prob[outcome]);
  check_norm();
  return outcome;
}

void StateVector::discard(int reg) {
  size_t pos = pos_checked(reg, "discard");
  size_t stride = pow_sz(p_, pos);
  size_t rest = amps_.size() / p_;
  auto at = [&](uint32_t v, size_t j) -> const Cx& {
    size_t lo = j % stride, hi = j / stride;
    return amps_[lo + v * stride + hi * stride * p_];
  };
  // pick the dominant row as the reference factor
  uint32_t vmax = 0;
  double best = -1;
  for (uint32_t v = 0; v < p_; ++v) {
    double s = 0;
    for (size_t j = 0; j < rest; ++j) s += std::norm(at(v, j));
    if (s > best) {
      best = s;
      vmax = v;
    }
  }
  double ref_norm = std::sqrt(best);
  std::vector<Cx> phi(rest);
  for (size_t j = 0; j < rest; ++j) phi[j] = at(vmax, j) / ref_norm;
  // every row must be proportional to phi, or the register is entangled
  double residual = 0;
  for (uint32_t v = 0; v < p_; ++v) {
    Cx chi{0, 0};
    for (size_t j = 0; j < rest; ++j) chi += std::conj(phi[j]) * at(v, j);
    for (size_t j = 0; j < rest; ++j) residual += std::norm(at(v, j) - chi * phi[j]);
  }
  if (std::sqrt(residual) > kTol)
    fail(Errc::entangled_discard,
         "register " + labels_[reg].display() + " is entangled with the remainder");

  amps_ = std::move(phi);
  // renormalize exactly (phi was built from one row; rounding only)
  double n2 = 0;
  for (const auto& a : amps_) n2 += std::norm(a);
  double scale = 1.0 / std::sqrt(n2);
  for (auto& a : amps_) a *= scale;

  handle_at_.erase(handle_at_.begin() + pos);
  pos_of_[reg] = -1;
  for (size_t q = pos; q < handle_at_.size(); ++q) pos_of_[handle_at_[q]] = static_cast<int>(q);
  --n_;
  check_norm();
}

std::vector<Cx> StateVector::extract(const std::vector<int>& regs) const {
  if (regs.empty()) fail(Errc::bad_register, "extract of empty register list");
  std::vector<size_t> pos;
  for (int h : regs) pos.push_back(pos_checked(h, "extract"));
  {
    auto sorted = pos;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      fail(Errc::bad_register, "extract with a repeated register");
  }
  size_t k = pos.size();
  size_t sub = pow_sz(p_, k);
  size_t rest = amps_.size() / sub;
  std::vector<size_t> others;
  for (size_t q = 0; q < n_; ++q)
    if (std::find(pos.begin(), pos.end(), q) == pos.end()) others.push_back(q);

  // M[s][j]: s from the chosen registers (in the order given), j from the rest
  std::vector<Cx> m(sub * rest);
  for (size_t x = 0; x < amps_.size(); ++x) {
    size_t s = 0, mult = 1;
    for (size_t i = 0; i < k; ++i) {
      s += ((x / pow_sz(p_, pos[i])) % p_) * mult;
      mult *= p_;
    }
    size_t j = 0;
    mult = 1;
    for (size_t q : others) {
      j += ((x / pow_sz(p_, q)) % p_) * mult;
      mult *= p_;
    }
    m[s * rest + j] = amps_[x];
  }

  // rank-1 check: all rest-columns proportional
  size_t jmax = 0;
  double best = -1;
  for (size_t j = 0; j < rest; ++j) {
    double s = 0;
    for (size_t v = 0; v < sub; ++v) s += std::norm(m[v * rest + j]);
    if (s > best) {
      best = s;
      jmax = j;
    }
  }
  double ref_norm = std::sqrt(best);
  std::vector<Cx> phi(sub);
  for (size_t v = 0; v < sub; ++v) phi[v] = m[v * rest + jmax] / ref_norm;
  double residual = 0;
  for (size_t j = 0; j < rest; ++j) {
    Cx chi{0, 0};
    for (size_t v = 0; v < sub; ++v) chi += std::conj(phi[v]) * m[v * rest + j];
    for (size_t v = 0; v < sub; ++v) residual += std::norm(m[v * rest + j] - chi * phi[v]);
  }
  if (std::sqrt(residual) > kTol)
    fail(Errc::not_pure, "selected registers are entangled with the remainder");
  double n2 = 0;
  for (const auto& a : phi) n2 += std::norm(a);
  double scale = 1.0 / std::sqrt(n2);
  for (auto& a : phi) a *= scale;
  return phi;
}

double StateVector::fidelity(const std::vector<int>& regs, const std::vector<Cx>& reference) const {
  std::vector<Cx> phi = extract(regs);
  if (reference.size() != phi.size())
    fail(Errc::schema_violation, "reference state has wrong dimension");
  Cx ip{0, 0};
  for (size_t v = 0; v < phi.size(); ++v) ip += std::conj(reference[v]) * phi[v];
  return std::norm(ip);
}

double StateVector::norm_sq() const {
  double s = 0;
  for (const auto& a : amps_) s += std::norm(a);
  return s;
}

void StateVector::check_norm() const {
  if (std::abs(norm_sq() - 1.0) > kTol)
    fail(Errc::not_normalized, "state norm drifted away from 1");
}

std::string StateVector::snapshot_json(double threshold) const {
  nlohmann::json doc;
  doc["p"] = p_;
  doc["registers"] = nlohmann::json::array();
  for (int h : handle_at_) doc["registers"].push_back(labels_[h].display());
  doc["amplitudes"] = nlohmann::json::array();
  for (size_t x = 0; x < amps_.size(); ++x) {
    if (std::abs(amps_[x]) <= threshold) continue;
    std::string digits;
    for (size_t q = 0; q < n_; ++q) digits += char('0' + (x / pow_sz(p_, q)) % p_);
    doc["amplitudes"].push_back(
        {{"basis", digits}, {"re", amps_[x].real()}, {"im", amps_[x].imag()}});
  }
  return doc.dump();
}

}  // namespace qnc
