#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "qnc/error.hpp"

namespace qnc {

using Cx = std::complex<double>;

// numeric slack for unitarity/purity checks; everything this library does is
// exact up to rounding, so violations beyond this indicate real bugs
constexpr double kTol = 1e-9;
// probabilities below this count as impossible when forcing outcomes
constexpr double kProbFloor = 1e-12;

enum class Role { input, source_half, edge, target_out, scratch };

struct RegisterLabel {
  std::string owner;  // node currently holding the register
  Role role = Role::scratch;
  int a = 0;  // input/source ordinal, unit-edge id, or target ordinal
  int b = 0;  // symbol ordinal for target outputs
  std::string display() const;
};

enum class Basis { computational, fourier };

// Dense state vector over n registers of prime dimension p.
//
// Math conventions (locked project-wide, see tests):
//   index digit of position r has stride p^r (position 0 least significant)
//   F      |x> -> (1/sqrt p) sum_y w^{xy} |y>,  w = exp(2 pi i / p)
//   Z(b)   |x> -> w^{bx} |x>
//   X(c)   |x> -> |x+c>
//   cadd   |x>|y> -> |x>|y + gx>
//   fourier-basis measurement = apply F^dagger, then read computationally
class StateVector {
public:
  StateVector(uint32_t p, size_t n, size_t max_registers = 0);
  static StateVector with_amplitudes(uint32_t p, size_t n, std::vector<Cx> amps,
                                     size_t max_registers = 0);

  uint32_t dim() const { return p_; }
  size_t size() const { return n_; }
  size_t max_registers() const { return max_registers_; }
  const std::vector<Cx>& amplitudes() const { return amps_; }

  // Registers are addressed by stable handles; discarding one renumbers the
  // internal positions but never invalidates other handles.
  int add_register(const RegisterLabel& label);
  std::vector<int> handles() const;  // live handles in position order
  bool live(int handle) const;
  size_t position(int handle) const;
  const RegisterLabel& label(int handle) const;
  void set_label(int handle, const RegisterLabel& label);

  void apply_fourier(int reg, bool inverse = false);
  void apply_phase(int reg, uint32_t b);
  void apply_shift(int reg, uint32_t c);
  void apply_controlled_add(int control, int target, uint32_t gamma);

  uint32_t measure(int reg, Basis basis, std::mt19937_64& rng);
  uint32_t measure_forced(int reg, Basis basis, uint32_t outcome);

  // Removes a register that is unentangled with the rest (within kTol).
  void discard(int reg);

  // The pure state carried by an ordered register subset; Errc::not_pure if
  // the subset is entangled with the remainder. Global phase follows the
  // dominant component of the remainder.
  std::vector<Cx> extract(const std::vector<int>& regs) const;
  // |<reference|state on regs>|^2
  double fidelity(const std::vector<int>& regs, const std::vector<Cx>& reference) const;

  double norm_sq() const;
  // amplitudes above threshold as JSON: digit strings are in position order
  std::string snapshot_json(double threshold = 1e-12) const;

private:
  void bump_size_check(size_t new_n) const;
  size_t pos_checked(int handle, const char* what) const;
  std::vector<double> marginals(size_t pos) const;
  void collapse(size_t pos, uint32_t value, double prob);
  void check_norm() const;

  uint32_t p_;
  size_t n_;
  size_t max_registers_;
  std::vector<Cx> amps_;
  std::vector<Cx> scratch_;
  std::vector<int> pos_of_;           // handle -> position, -1 once discarded
  std::vector<int> handle_at_;        // position -> handle
  std::vector<RegisterLabel> labels_;  // by handle
};

// Deterministic uniform double in [0,1) from a seeded engine.
double uniform01(std::mt19937_64& rng);

// w^{k} = exp(2 pi i k / p)
Cx root_of_unity(uint32_t p, int64_t k);

size_t pow_sz(uint32_t p, size_t n);

}  // namespace qnc
