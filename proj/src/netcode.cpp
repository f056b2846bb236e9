#include "qnc/netcode.hpp"

#include <algorithm>
#include <random>

#include <json.hpp>

namespace qnc {

namespace {

constexpr int kMaxAttempts = 64;

uint32_t draw(std::mt19937_64& rng, uint32_t p) {
  // rejection sampling keeps the draw unbiased and fully deterministic
  uint64_t bound = UINT64_MAX - UINT64_MAX % p;
  uint64_t x;
  do {
    x = rng();
  } while (x >= bound);
  return static_cast<uint32_t>(x % p);
}

int source_ordinal(const UnitNetwork& net, int node) {
  for (size_t i = 0; i < net.sources.size(); ++i)
    if (net.sources[i] == node) return static_cast<int>(i);
  return -1;
}

int target_ordinal(const UnitNetwork& net, int node) {
  for (size_t i = 0; i < net.targets.size(); ++i)
    if (net.targets[i] == node) return static_cast<int>(i);
  return -1;
}

}  // namespace

LinearCode construct_linear_code(const UnitNetwork& net, uint32_t p, uint64_t seed) {
  if (!is_prime(p)) fail(Errc::not_prime, "field size " + std::to_string(p) + " is not prime");
  size_t h = net.sources.size();
  std::vector<int> order = topo_order(net);

  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    std::seed_seq ss{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                     static_cast<uint32_t>(attempt)};
    std::mt19937_64 rng(ss);

    LinearCode code;
    code.net = net;
    code.p = p;
    code.rate = h;
    code.seed = seed;
    code.attempts_used = attempt + 1;
    code.edge_vectors.assign(net.edges.size(), fvec_zero(h, p));
    code.decode.resize(net.targets.size());
    code.decode_basis.resize(net.targets.size());

    // draw local coefficients node by node and propagate encoding vectors
    for (int v : order) {
      CodingStep step;
      step.node = v;
      int si = source_ordinal(net, v);
      int ti = target_ordinal(net, v);
      if (si >= 0) step.inputs.push_back({Port::virtual_in, si});
      for (int e : net.in_edges[v]) step.inputs.push_back({Port::channel, e});
      for (int e : net.out_edges[v]) step.outputs.push_back({Port::channel, e});
      if (ti >= 0)
        for (size_t i = 0; i < h; ++i) step.outputs.push_back({Port::virtual_out, (int)i});

      step.gamma.assign(step.inputs.size(), fvec_zero(step.outputs.size(), p));
      for (size_t j = 0; j < step.outputs.size(); ++j) {
        if (step.outputs[j].kind != Port::channel) continue;  // decode columns solved later
        for (size_t i = 0; i < step.inputs.size(); ++i)
          step.gamma[i][j] = FieldElem(draw(rng, p), p);
      }

      auto input_vector = [&](const Port& port) {
        return port.kind == Port::virtual_in ? fvec_unit(h, port.index, p)
                                             : code.edge_vectors[port.index];
      };
      for (size_t j = 0; j < step.outputs.size(); ++j) {
        if (step.outputs[j].kind != Port::channel) continue;
        FVec acc = fvec_zero(h, p);
        for (size_t i = 0; i < step.inputs.size(); ++i)
          fvec_add_scaled(acc, step.gamma[i][j], input_vector(step.inputs[i]));
        code.edge_vectors[step.outputs[j].index] = acc;
      }

      // classification is descriptive: a single-input node that copies its
      // input verbatim onto every channel is a pure broadcast
      if (si >= 0) {
        step.kind = StepKind::source_prep;
      } else if (ti >= 0) {
        step.kind = StepKind::target_decode;
      } else {
        bool fan = step.inputs.size() == 1 && !step.outputs.empty();
        for (size_t j = 0; fan && j < step.outputs.size(); ++j)
          if (step.gamma[0][j].value() != 1) fan = false;
        step.kind = fan ? StepKind::fan_out : StepKind::coding;
      }
      code.steps.push_back(std::move(step));
    }

    // rank check + decode solve at every target
    bool ok = true;
    for (size_t tj = 0; tj < net.targets.size() && ok; ++tj) {
      int v = net.targets[tj];
      const auto& ins = net.in_edges[v];
      FMat rows;
      for (int e : ins) rows.push_back(code.edge_vectors[e]);
      std::vector<size_t> basis = greedy_row_basis(rows);
      if (basis.size() < h) {
        ok = false;
        break;
      }
      basis.resize(h);
      FMat V;
      std::vector<int> basis_edges;
      for (size_t r : basis) {
        V.push_back(rows[r]);
        basis_edges.push_back(ins[r]);
      }
      FMat D = mat_inverse(V);  // a = D . (values on basis edges)
      code.decode[tj] = D;
      code.decode_basis[tj] = basis_edges;

      // fill the virtual-output columns of the target's step
      for (auto& step : code.steps) {
        if (step.node != v) continue;
        for (size_t j = 0; j < step.outputs.size(); ++j) {
          if (step.outputs[j].kind != Port::virtual_out) continue;
          int out_i = step.outputs[j].index;
          for (size_t r = 0; r < h; ++r) {
            // locate the input port carrying basis edge r
            for (size_t i = 0; i < step.inputs.size(); ++i)
              if (step.inputs[i].kind == Port::channel &&
                  step.inputs[i].index == basis_edges[r])
                step.gamma[i][j] = D[out_i][r];
          }
        }
      }
    }
    if (ok) return code;
  }
  fail(Errc::code_construction_failed,
       "no full-rank code found in " + std::to_string(kMaxAttempts) +
           " attempts over F_" + std::to_string(p) + "; retry with a larger field");
}

const std::vector<CodingStep>& compile_steps(const LinearCode& code) { return code.steps; }

const std::vector<FVec>& global_encoding_vectors(const LinearCode& code) {
  return code.edge_vectors;
}

std::vector<FVec> classical_simulate(const LinearCode& code, const FVec& a) {
  size_t h = code.rate;
  if (a.size() != h) fail(Errc::schema_violation, "input vector length != |S|");
  for (const auto& x : a)
    if (x.modulus() != code.p) fail(Errc::modulus_mismatch, "input symbols not in F_p");

  std::vector<FieldElem> edge_value(code.net.edges.size(), FieldElem(0, code.p));
  std::vector<FVec> out(code.net.targets.size(), fvec_zero(h, code.p));
  for (const auto& step : code.steps) {
    int ti = target_ordinal(code.net, step.node);
    auto input_value = [&](const Port& port) {
      return port.kind == Port::virtual_in ? a[port.index] : edge_value[port.index];
    };
    for (size_t j = 0; j < step.outputs.size(); ++j) {
      FieldElem acc(0, code.p);
      for (size_t i = 0; i < step.inputs.size(); ++i)
        acc = acc + step.gamma[i][j] * input_value(step.inputs[i]);
      if (step.outputs[j].kind == Port::channel)
        edge_value[step.outputs[j].index] = acc;
      else
        out[ti][step.outputs[j].index] = acc;
    }
  }
  return out;
}

std::string serialize_code(const LinearCode& code) {
  using nlohmann::json;
  json doc;
  doc["p"] = code.p;
  doc["rate"] = code.rate;
  doc["seed"] = code.seed;
  doc["attempts"] = code.attempts_used;

  auto port_str = [&](const Port& port) {
    switch (port.kind) {
      case Port::virtual_in: return "source:" + std::to_string(port.index);
      case Port::channel: return "edge:" + std::to_string(port.index);
      default: return "output:" + std::to_string(port.index);
    }
  };
  auto mat_json = [](const FMat& m) {
    json rows = json::array();
    for (const auto& row : m) {
      json r = json::array();
      for (const auto& x : row) r.push_back(x.value());
      rows.push_back(r);
    }
    return rows;
  };

  doc["steps"] = json::array();
  for (const auto& step : code.steps) {
    static const char* kinds[] = {"source-prep", "coding", "fan-out", "target-decode"};
    json s;
    s["node"] = code.net.nodes[step.node];
    s["kind"] = kinds[static_cast<int>(step.kind)];
    s["inputs"] = json::array();
    for (const auto& port : step.inputs) s["inputs"].push_back(port_str(port));
    s["outputs"] = json::array();
    for (const auto& port : step.outputs) s["outputs"].push_back(port_str(port));
    s["gamma"] = mat_json(step.gamma);
    doc["steps"].push_back(s);
  }

  doc["edge_vectors"] = json::array();
  for (const auto& v : code.edge_vectors) {
    json r = json::array();
    for (const auto& x : v) r.push_back(x.value());
    doc["edge_vectors"].push_back(r);
  }

  doc["decode"] = json::array();
  for (size_t tj = 0; tj < code.decode.size(); ++tj) {
    json d;
    d["target"] = code.net.nodes[code.net.targets[tj]];
    d["basis_edges"] = code.decode_basis[tj];
    d["matrix"] = mat_json(code.decode[tj]);
    doc["decode"].push_back(d);
  }
  return doc.dump(2);
}

}  // namespace qnc
