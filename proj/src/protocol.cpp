#include "qnc/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

namespace qnc {

namespace {

using ojson = nlohmann::ordered_json;

const char* op_name(OpKind k) {
  switch (k) {
    case OpKind::create: return "create";
    case OpKind::prepare_plus: return "prepare_plus";
    case OpKind::controlled_add: return "controlled_add";
    default: return "transmit";
  }
}

std::string basis_name(Basis b) {
  return b == Basis::computational ? "computational" : "fourier";
}

// (1/sqrt p) sum_a |a>|a> laid out with the first register least significant
std::vector<Cx> epr_pair(uint32_t p) {
  std::vector<Cx> v(size_t(p) * p, Cx{0, 0});
  for (uint32_t a = 0; a < p; ++a) v[a + size_t(p) * a] = 1.0 / std::sqrt(double(p));
  return v;
}

}  // namespace

std::string RegId::display() const {
  switch (role) {
    case Role::input: return "S" + std::to_string(a + 1);
    case Role::source_half: return "S'" + std::to_string(a + 1);
    case Role::edge: return "R" + std::to_string(a + 1);
    case Role::target_out:
      return "T" + std::to_string(a + 1) + "." + std::to_string(b + 1);
    default: return "q" + std::to_string(a);
  }
}

std::string Op::display() const {
  switch (kind) {
    case OpKind::create: return node + ": create " + reg.display();
    case OpKind::prepare_plus: return node + ": prepare " + reg.display() + " in |+>";
    case OpKind::controlled_add:
      return node + ": " + reg.display() + " += " + std::to_string(gamma) + "*" +
             control.display();
    default: return node + " -> " + to_node + ": transmit " + reg.display();
  }
}

size_t QuantumProgram::transmissions() const {
  size_t n = 0;
  for (const Op& op : ops) n += op.kind == OpKind::transmit;
  return n;
}

std::string QuantumProgram::to_text() const {
  std::string out;
  for (const Op& op : ops) {
    out += op.display();
    out += '\n';
  }
  return out;
}

QuantumProgram compile_program(const LinearCode& code) {
  const UnitNetwork& un = code.net;
  QuantumProgram prog{code.p, code.rate, {}};

  for (size_t k = 0; k < code.rate; ++k) {
    const std::string& node = un.nodes[size_t(un.sources[k])];
    RegId half{Role::source_half, int(k), 0};
    prog.ops.push_back({OpKind::create, node, half, {}, 0, ""});
    prog.ops.push_back({OpKind::prepare_plus, node, half, {}, 0, ""});
  }

  for (const CodingStep& st : code.steps) {
    const std::string& node = un.nodes[size_t(st.node)];
    int target_pos = -1;
    if (st.kind == StepKind::target_decode) {
      auto it = std::find(un.targets.begin(), un.targets.end(), st.node);
      target_pos = int(it - un.targets.begin());
    }
    auto port_id = [&](const Port& pt) -> RegId {
      switch (pt.kind) {
        case Port::virtual_in: return {Role::source_half, pt.index, 0};
        case Port::channel: return {Role::edge, pt.index, 0};
        default: return {Role::target_out, target_pos, pt.index};
      }
    };
    for (const Port& o : st.outputs)
      prog.ops.push_back({OpKind::create, node, port_id(o), {}, 0, ""});
    for (size_t i = 0; i < st.inputs.size(); ++i)
      for (size_t j = 0; j < st.outputs.size(); ++j) {
        uint32_t g = st.gamma[i][j].value();
        if (g != 0)
          prog.ops.push_back({OpKind::controlled_add, node, port_id(st.outputs[j]),
                              port_id(st.inputs[i]), g, ""});
      }
    for (const Port& o : st.outputs)
      if (o.kind == Port::channel)
        prog.ops.push_back({OpKind::transmit, node, {Role::edge, o.index, 0}, {}, 0,
                            un.nodes[size_t(un.edges[size_t(o.index)].to)]});
  }
  return prog;
}

TargetSelection default_selection(const Network& net) {
  size_t h = net.sources.size();
  if (h > net.targets.size())
    fail(Errc::bad_selection, "need " + std::to_string(h) +
                                  " receiving targets but the network only has " +
                                  std::to_string(net.targets.size()));
  TargetSelection sel;
  sel.nodes.assign(net.targets.begin(), net.targets.begin() + long(h));
  sel.perm.resize(h);
  for (size_t i = 0; i < h; ++i) sel.perm[i] = i;
  return sel;
}

void validate_selection(const UnitNetwork& net, size_t h, const TargetSelection& sel) {
  if (sel.nodes.size() != h || sel.perm.size() != h)
    fail(Errc::bad_selection, "selection must name exactly " + std::to_string(h) +
                                  " targets and a permutation of the same size");
  std::set<std::string> seen;
  for (const std::string& id : sel.nodes) {
    int idx = net.node_index(id);
    if (std::find(net.targets.begin(), net.targets.end(), idx) == net.targets.end())
      fail(Errc::bad_selection, "'" + id + "' is not a target of the network");
    if (!seen.insert(id).second)
      fail(Errc::bad_selection, "target '" + id + "' selected twice");
  }
  std::vector<bool> hit(h, false);
  for (size_t v : sel.perm) {
    if (v >= h || hit[v])
      fail(Errc::bad_selection, "perm must be a permutation of 0.." +
                                    std::to_string(h - 1));
    hit[v] = true;
  }
}

std::vector<Cx> input_zero(uint32_t p, size_t h) {
  std::vector<Cx> v(pow_sz(p, h), Cx{0, 0});
  v[0] = 1.0;
  return v;
}

std::vector<Cx> input_plus(uint32_t p, size_t h) {
  size_t dim = pow_sz(p, h);
  return std::vector<Cx>(dim, Cx{1.0 / std::sqrt(double(dim)), 0});
}

std::vector<Cx> input_random(uint32_t p, size_t h, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<Cx> v(pow_sz(p, h));
  double n2 = 0;
  for (Cx& a : v) {
    a = Cx(g(rng), g(rng));
    n2 += std::norm(a);
  }
  for (Cx& a : v) a /= std::sqrt(n2);
  return v;
}

ProtocolRun::ProtocolRun(LinearCode code, std::vector<Cx> input, size_t max_registers)
    : code_(std::move(code)),
      input_(std::move(input)),
      prog_(compile_program(code_)),
      psi_(StateVector::with_amplitudes(code_.p, code_.rate, input_, max_registers)) {
  const UnitNetwork& un = code_.net;
  std::vector<int> handles = psi_.handles();
  for (size_t k = 0; k < code_.rate; ++k) {
    RegId id{Role::input, int(k), 0};
    handle_[id] = handles[k];
    psi_.set_label(handles[k],
                   {un.nodes[size_t(un.sources[k])], Role::input, int(k), 0});
  }
  for (const Op& op : prog_.ops) execute(op);
}

void ProtocolRun::execute(const Op& op) {
  ojson j;
  j["phase"] = "propagate";
  j["op"] = op_name(op.kind);
  j["node"] = op.node;
  j["reg"] = op.reg.display();
  switch (op.kind) {
    case OpKind::create: {
      handle_[op.reg] =
          psi_.add_register({op.node, op.reg.role, op.reg.a, op.reg.b});
      functional_[op.reg] = op.reg.role == Role::source_half
                                ? fvec_unit(code_.rate, size_t(op.reg.a), code_.p)
                                : fvec_zero(code_.rate, code_.p);
      break;
    }
    case OpKind::prepare_plus:
      psi_.apply_fourier(handle_.at(op.reg));
      break;
    case OpKind::controlled_add: {
      psi_.apply_controlled_add(handle_.at(op.control), handle_.at(op.reg), op.gamma);
      fvec_add_scaled(functional_[op.reg], FieldElem(op.gamma, code_.p),
                      functional_.at(op.control));
      j["control"] = op.control.display();
      j["gamma"] = op.gamma;
      break;
    }
    case OpKind::transmit: {
      int h = handle_.at(op.reg);
      RegisterLabel lab = psi_.label(h);
      lab.owner = op.to_node;
      psi_.set_label(h, lab);
      j["to"] = op.to_node;
      break;
    }
  }
  transcript_.push_back(j.dump());
}

int ProtocolRun::reg(const RegId& id) const {
  auto it = handle_.find(id);
  if (it == handle_.end() || !psi_.live(it->second))
    fail(Errc::bad_register, "no live register " + id.display());
  return it->second;
}

const FVec& ProtocolRun::functional(const RegId& id) const {
  auto it = functional_.find(id);
  if (it == functional_.end())
    fail(Errc::bad_register, "no functional recorded for " + id.display());
  return it->second;
}

uint32_t ProtocolRun::read_and_drop(const RegId& id, Basis basis, const Measurer& m,
                                    const char* phase) {
  int h = reg(id);
  uint32_t y = m(id, h, basis);
  psi_.discard(h);
  ojson j;
  j["phase"] = phase;
  j["event"] = "measure";
  j["reg"] = id.display();
  j["basis"] = basis_name(basis);
  j["outcome"] = y;
  transcript_.push_back(j.dump());
  return y;
}

void ProtocolRun::note_correction(const char* phase, const char* event,
                                  const RegId& reg, uint32_t amount) {
  ojson j;
  j["phase"] = phase;
  j["event"] = event;
  j["reg"] = reg.display();
  j["amount"] = amount;
  transcript_.push_back(j.dump());
}

std::vector<uint32_t> ProtocolRun::measure_edges_impl(const Measurer& m,
                                                      const std::vector<size_t>* order) {
  if (edges_measured_) fail(Errc::bad_register, "channel registers already measured");
  size_t n_edges = code_.net.edges.size();
  std::vector<size_t> slots(n_edges);
  for (size_t i = 0; i < n_edges; ++i) slots[i] = i;
  if (order != nullptr) {
    if (order->size() != n_edges ||
        !std::is_permutation(order->begin(), order->end(), slots.begin()))
      fail(Errc::schema_violation, "edge measurement order must permute all edges");
    slots = *order;
  }

  std::vector<uint32_t> outcomes(n_edges, 0);
  std::vector<uint32_t> phase_acc(code_.rate, 0);
  for (size_t e : slots) {
    RegId id{Role::edge, int(e), 0};
    const FVec f = functional(id);
    uint32_t y = read_and_drop(id, Basis::fourier, m, "fix");
    outcomes[e] = y;
    // reading y from a register worth f.a stamps w^{-y(f.a)} on branch a
    for (size_t k = 0; k < code_.rate; ++k)
      phase_acc[k] = (phase_acc[k] + uint64_t(y) * f[k].value()) % code_.p;
    functional_.erase(id);
  }

  // cancel the stamp on the first target's legs, which hold a_k verbatim
  for (size_t k = 0; k < code_.rate; ++k) {
    RegId leg{Role::target_out, 0, int(k)};
    psi_.apply_phase(reg(leg), phase_acc[k]);
    note_correction("fix", "phase_correction", leg, phase_acc[k]);
  }
  edges_measured_ = true;
  return outcomes;
}

std::vector<uint32_t> ProtocolRun::measure_edges(std::mt19937_64& rng,
                                                 const std::vector<size_t>* order) {
  return measure_edges_impl(
      [&](const RegId&, int h, Basis b) { return psi_.measure(h, b, rng); }, order);
}

std::vector<uint32_t> ProtocolRun::measure_edges_forced(
    const std::vector<uint32_t>& outcomes, const std::vector<size_t>* order) {
  if (outcomes.size() != code_.net.edges.size())
    fail(Errc::schema_violation, "need one forced outcome per unit edge");
  return measure_edges_impl(
      [&](const RegId& id, int h, Basis b) {
        return psi_.measure_forced(h, b, outcomes[size_t(id.a)]);
      },
      order);
}

void ProtocolRun::distill_impl(const TargetSelection& sel, const Measurer& m) {
  if (!edges_measured_) fail(Errc::bad_register, "measure the channels first");
  if (distilled_) fail(Errc::bad_register, "already distilled");
  validate_selection(code_.net, code_.rate, sel);

  const UnitNetwork& un = code_.net;
  receivers_.clear();
  outputs_.clear();
  for (size_t k = 0; k < code_.rate; ++k) {
    int node = un.node_index(sel.nodes[sel.perm[k]]);
    auto it = std::find(un.targets.begin(), un.targets.end(), node);
    int keep = int(it - un.targets.begin());

    uint32_t acc = 0;
    for (size_t t = 0; t < un.targets.size(); ++t) {
      if (int(t) == keep) continue;
      acc = (acc + read_and_drop({Role::target_out, int(t), int(k)}, Basis::fourier, m,
                                 "distill")) %
            code_.p;
      functional_.erase(RegId{Role::target_out, int(t), int(k)});
    }
    RegId half{Role::source_half, int(k), 0};
    psi_.apply_phase(reg(half), acc);
    note_correction("distill", "phase_correction", half, acc);

    receivers_.push_back({Role::target_out, keep, int(k)});
    outputs_.push_back(reg(receivers_.back()));
  }
  distilled_ = true;
}

void ProtocolRun::distill(const TargetSelection& sel, std::mt19937_64& rng) {
  distill_impl(sel,
               [&](const RegId&, int h, Basis b) { return psi_.measure(h, b, rng); });
}

void ProtocolRun::distill_forced(const TargetSelection& sel,
                                 const std::vector<uint32_t>& outcomes) {
  size_t need = code_.rate * (code_.net.targets.size() - 1);
  if (outcomes.size() != need)
    fail(Errc::schema_violation,
         "need " + std::to_string(need) + " forced outcomes for distillation");
  size_t next = 0;
  distill_impl(sel, [&](const RegId&, int h, Basis b) {
    return psi_.measure_forced(h, b, outcomes[next++]);
  });
}

void ProtocolRun::teleport_impl(const Measurer& m) {
  if (!distilled_) fail(Errc::bad_register, "distill before teleporting");
  if (teleported_) fail(Errc::bad_register, "already teleported");

  const std::vector<Cx> epr = epr_pair(code_.p);
  for (size_t k = 0; k < code_.rate; ++k) {
    RegId half{Role::source_half, int(k), 0};
    RegId payload{Role::input, int(k), 0};
    int out = outputs_[k];
    if (psi_.fidelity({reg(half), out}, epr) < 1.0 - kTol)
      fail(Errc::pair_not_epr, "pair for payload " + std::to_string(k + 1) +
                                   " is not a shared maximally entangled state");

    psi_.apply_controlled_add(reg(payload), reg(half), code_.p - 1);
    uint32_t mm = read_and_drop(half, Basis::computational, m, "teleport");
    uint32_t yy = read_and_drop(payload, Basis::fourier, m, "teleport");
    psi_.apply_shift(out, (code_.p - mm) % code_.p);
    psi_.apply_phase(out, yy);

    ojson j;
    j["phase"] = "teleport";
    j["event"] = "correction";
    j["reg"] = receivers_[k].display();
    j["shift"] = (code_.p - mm) % code_.p;
    j["phase_amount"] = yy;
    transcript_.push_back(j.dump());
  }
  teleported_ = true;
}

void ProtocolRun::teleport(std::mt19937_64& rng) {
  teleport_impl(
      [&](const RegId&, int h, Basis b) { return psi_.measure(h, b, rng); });
}

void ProtocolRun::teleport_forced(
    const std::vector<std::pair<uint32_t, uint32_t>>& outcomes) {
  if (outcomes.size() != code_.rate)
    fail(Errc::schema_violation, "need one (m, y) pair per payload");
  teleport_impl([&](const RegId& id, int h, Basis b) {
    const auto& pair = outcomes[size_t(id.a)];
    return psi_.measure_forced(h, b,
                               id.role == Role::source_half ? pair.first : pair.second);
  });
}

std::vector<int> ProtocolRun::output_registers() const {
  if (!distilled_) fail(Errc::bad_register, "no receivers before distillation");
  return outputs_;
}

double ProtocolRun::payload_fidelity() const {
  if (!teleported_) fail(Errc::bad_register, "fidelity is defined after teleportation");
  return psi_.fidelity(outputs_, input_);
}

uint32_t protocol_field(const Network& net, uint32_t requested) {
  uint32_t auto_p = choose_field_size(uint32_t(net.targets.size()));
  if (requested == 0) return auto_p;
  if (!is_prime(requested))
    fail(Errc::not_prime, "field size " + std::to_string(requested) + " is not prime");
  return std::max(requested, auto_p);
}

LinearCode construct_with_seed_scan(const UnitNetwork& net, uint32_t p,
                                    uint64_t first_seed, uint64_t scan) {
  for (uint64_t s = first_seed; s < first_seed + scan; ++s) {
    try {
      return construct_linear_code(net, p, s);
    } catch (const Error& e) {
      if (e.code() != Errc::code_construction_failed) throw;
    }
  }
  fail(Errc::code_construction_failed,
       "no code over F_" + std::to_string(p) + " found in " + std::to_string(scan) +
           " seeds starting at " + std::to_string(first_seed) +
           "; a larger field should work");
}

RunSummary run_protocol(const Network& net, const RunOptions& opt) {
  validate_network(net);
  Feasibility feas = multicast_feasible(net);
  if (!feas.feasible)
    fail(Errc::infeasible, "target '" + feas.violating_target + "' has max flow " +
                               std::to_string(feas.flow) + " but " +
                               std::to_string(net.sources.size()) +
                               " symbols must reach it");

  uint32_t p = protocol_field(net, opt.field);
  UnitNetwork un = expand_capacities(net);
  LinearCode code = construct_with_seed_scan(un, p, opt.code_seed, opt.seed_scan);

  size_t h = net.sources.size();
  std::vector<Cx> input = opt.input.empty() ? input_plus(p, h) : opt.input;
  if (input.size() != pow_sz(p, h))
    fail(Errc::schema_violation,
         "payload needs " + std::to_string(pow_sz(p, h)) + " amplitudes");
  TargetSelection sel = opt.selection ? *opt.selection : default_selection(net);

  ProtocolRun run(std::move(code), std::move(input), opt.max_registers);
  std::seed_seq ss{uint32_t(opt.meas_seed), uint32_t(opt.meas_seed >> 32), 0x6d656173u};
  std::mt19937_64 rng(ss);

  RunSummary out;
  out.edge_outcomes = run.measure_edges(rng);
  run.distill(sel, rng);
  run.teleport(rng);

  out.p = p;
  out.code_seed = run.code().seed;
  out.attempts_used = run.code().attempts_used;
  out.transmissions = run.program().transmissions();
  for (const RegId& r : run.receivers()) out.receivers.push_back(r.display());
  out.fidelity = run.payload_fidelity();
  out.transcript = run.transcript();
  return out;
}

}  // namespace qnc
