#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "qnc/netcode.hpp"

using namespace qnc;

namespace {

LinearCode construct_any_seed(const UnitNetwork& net, uint32_t p) {
  for (uint64_t seed = 0; seed < 500; ++seed) {
    try {
      return construct_linear_code(net, p, seed);
    } catch (const Error& e) {
      if (e.code() != Errc::code_construction_failed) throw;
    }
  }
  REQUIRE_MESSAGE(false, "no working seed below 500");
  throw std::logic_error("unreachable");
}

// ground truth: every input vector decodes to itself at every target
void check_exhaustive(const LinearCode& code) {
  size_t h = code.rate;
  size_t total = 1;
  for (size_t i = 0; i < h; ++i) total *= code.p;
  REQUIRE(total <= 1024);
  for (size_t x = 0; x < total; ++x) {
    FVec a;
    size_t rest = x;
    for (size_t i = 0; i < h; ++i) {
      a.emplace_back(rest % code.p, code.p);
      rest /= code.p;
    }
    auto outs = classical_simulate(code, a);
    REQUIRE(outs.size() == code.net.targets.size());
    for (const auto& out : outs) CHECK(out == a);
  }
}

uint32_t vec_digit(const FVec& v, size_t i) { return v[i].value(); }

}  // namespace

TEST_CASE("butterfly code over F_2 has the forced structure") {
  UnitNetwork net = expand_capacities(parse_network(load_fixture("butterfly.json")));
  LinearCode code = construct_any_seed(net, 2);
  CHECK(code.rate == 2);
  CHECK(code.attempts_used >= 1);

  // fixture edge order: 0:s1->t1 1:s1->n1 2:s2->t2 3:s2->n1 4:n1->n2 5:n2->t1 6:n2->t2
  const auto& vecs = global_encoding_vectors(code);
  for (int e : {0, 1}) {
    CHECK(vec_digit(vecs[e], 0) == 1);
    CHECK(vec_digit(vecs[e], 1) == 0);
  }
  for (int e : {2, 3}) {
    CHECK(vec_digit(vecs[e], 0) == 0);
    CHECK(vec_digit(vecs[e], 1) == 1);
  }
  for (int e : {4, 5, 6}) {
    CHECK(vec_digit(vecs[e], 0) == 1);
    CHECK(vec_digit(vecs[e], 1) == 1);
  }

  // decode at t1: incoming peer order is [n2 (edge 5), s1 (edge 0)]
  CHECK(code.decode_basis[0] == std::vector<int>{5, 0});
  CHECK(code.decode[0][0][0].value() == 0);
  CHECK(code.decode[0][0][1].value() == 1);
  CHECK(code.decode[0][1][0].value() == 1);
  CHECK(code.decode[0][1][1].value() == 1);
  // decode at t2: [n2 (edge 6), s2 (edge 2)]
  CHECK(code.decode_basis[1] == std::vector<int>{6, 2});
  CHECK(code.decode[1][0][0].value() == 1);
  CHECK(code.decode[1][0][1].value() == 1);
  CHECK(code.decode[1][1][0].value() == 0);
  CHECK(code.decode[1][1][1].value() == 1);

  check_exhaustive(code);
}

TEST_CASE("any two working butterfly F_2 codes coincide") {
  UnitNetwork net = expand_capacities(parse_network(load_fixture("butterfly.json")));
  LinearCode first = construct_any_seed(net, 2);
  int found = 0;
  for (uint64_t seed = first.seed + 1; seed < 200 && found < 2; ++seed) {
    try {
      LinearCode other = construct_linear_code(net, 2, seed);
      ++found;
      CHECK(serialize_code(other) != "");
      for (size_t e = 0; e < first.edge_vectors.size(); ++e)
        CHECK(other.edge_vectors[e] == first.edge_vectors[e]);
    } catch (const Error&) {
    }
  }
  CHECK(found > 0);
}

TEST_CASE("same seed reproduces the identical code") {
  UnitNetwork net = expand_capacities(parse_network(load_fixture("butterfly.json")));
  LinearCode a = construct_any_seed(net, 2);
  LinearCode b = construct_linear_code(net, 2, a.seed);
  CHECK(serialize_code(a) == serialize_code(b));
}

TEST_CASE("step kinds and ordering on the butterfly") {
  UnitNetwork net = expand_capacities(parse_network(load_fixture("butterfly.json")));
  LinearCode code = construct_any_seed(net, 2);
  const auto& steps = compile_steps(code);
  REQUIRE(steps.size() == 6);
  std::vector<std::string> order;
  for (const auto& s : steps) order.push_back(net.nodes[s.node]);
  CHECK(order == std::vector<std::string>{"s1", "s2", "n1", "n2", "t1", "t2"});
  CHECK(steps[0].kind == StepKind::source_prep);
  CHECK(steps[1].kind == StepKind::source_prep);
  CHECK(steps[2].kind == StepKind::coding);
  CHECK(steps[3].kind == StepKind::fan_out);
  CHECK(steps[4].kind == StepKind::target_decode);
  CHECK(steps[5].kind == StepKind::target_decode);

  // sources: one virtual input + no channels in; targets: two virtual outputs
  CHECK(steps[0].inputs.size() == 1);
  CHECK(steps[0].inputs[0].kind == Port::virtual_in);
  CHECK(steps[4].outputs.size() == 2);
  CHECK(steps[4].outputs[0].kind == Port::virtual_out);
}

TEST_CASE("propagation law holds at every channel") {
  for (const char* name : {"butterfly.json", "two-paths.json", "combination-3.json"}) {
    UnitNetwork net = expand_capacities(parse_network(load_fixture(name)));
    uint32_t p = choose_field_size(static_cast<uint32_t>(net.targets.size()));
    LinearCode code = construct_any_seed(net, p);
    size_t h = code.rate;
    for (const auto& step : compile_steps(code)) {
      for (size_t j = 0; j < step.outputs.size(); ++j) {
        if (step.outputs[j].kind != Port::channel) continue;
        FVec acc = fvec_zero(h, p);
        for (size_t i = 0; i < step.inputs.size(); ++i) {
          FVec in = step.inputs[i].kind == Port::virtual_in
                        ? fvec_unit(h, step.inputs[i].index, p)
                        : code.edge_vectors[step.inputs[i].index];
          fvec_add_scaled(acc, step.gamma[i][j], in);
        }
        CHECK(acc == code.edge_vectors[step.outputs[j].index]);
      }
    }
  }
}

TEST_CASE("single edge") {
  UnitNetwork net = expand_capacities(parse_network(load_fixture("single-edge.json")));
  LinearCode code = construct_any_seed(net, 2);
  CHECK(code.rate == 1);
  CHECK(code.edge_vectors[0][0].value() == 1);
  CHECK(code.decode[0][0][0].value() == 1);
  check_exhaustive(code);
}

TEST_CASE("remaining fixtures decode exhaustively") {
  for (const char* name : {"two-paths.json", "fanout-3.json", "combination-3.json"}) {
    Network doc = parse_network(load_fixture(name));
    UnitNetwork net = expand_capacities(doc);
    uint32_t p = choose_field_size(static_cast<uint32_t>(doc.targets.size()));
    INFO(name << " over F_" << p);
    LinearCode code = construct_any_seed(net, p);
    check_exhaustive(code);
  }
}

TEST_CASE("butterfly over F_3 still decodes") {
  UnitNetwork net = expand_capacities(parse_network(load_fixture("butterfly.json")));
  LinearCode code = construct_any_seed(net, 3);
  CHECK(code.p == 3);
  check_exhaustive(code);
}

TEST_CASE("capacity-2 relay uses both parallel channels") {
  Network doc;
  doc.nodes = {"s", "r", "t"};
  doc.edges = {{"s", "r", 2}, {"r", "t", 2}};
  doc.sources = {"s"};
  doc.targets = {"t"};
  UnitNetwork net = expand_capacities(doc);
  REQUIRE(net.edges.size() == 4);
  LinearCode code = construct_any_seed(net, 2);
  check_exhaustive(code);
}

TEST_CASE("retry budget exhausts on a field that is too small") {
  // all-pairs middle-layer network over 4 relays: needs pairwise independent
  // relay vectors, and F_2 only has three directions to hand out
  Network doc;
  doc.nodes = {"s1", "s2", "m1", "m2", "m3", "m4"};
  for (int i = 1; i <= 4; ++i) {
    doc.edges.push_back({"s1", "m" + std::to_string(i), 1});
    doc.edges.push_back({"s2", "m" + std::to_string(i), 1});
  }
  int t = 0;
  for (int i = 1; i <= 4; ++i)
    for (int j = i + 1; j <= 4; ++j) {
      std::string name = "t" + std::to_string(++t);
      doc.nodes.push_back(name);
      doc.edges.push_back({"m" + std::to_string(i), name, 1});
      doc.edges.push_back({"m" + std::to_string(j), name, 1});
      doc.targets.push_back(name);
    }
  doc.sources = {"s1", "s2"};
  UnitNetwork net = expand_capacities(doc);
  REQUIRE(multicast_feasible(doc).feasible);

  try {
    construct_linear_code(net, 2, 0);
    FAIL("construction over F_2 should be impossible here");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::code_construction_failed);
    CHECK(std::string(e.what()).find("larger field") != std::string::npos);
  }
  // ...and a larger field fixes it
  LinearCode fixed = construct_any_seed(net, 5);
  check_exhaustive(fixed);
}

TEST_CASE("construction rejects a composite field size") {
  UnitNetwork net = expand_capacities(parse_network(load_fixture("single-edge.json")));
  try {
    construct_linear_code(net, 4, 0);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::not_prime);
  }
}

TEST_CASE("classical_simulate validates its input") {
  UnitNetwork net = expand_capacities(parse_network(load_fixture("single-edge.json")));
  LinearCode code = construct_any_seed(net, 2);
  CHECK_THROWS_AS(classical_simulate(code, FVec{}), Error);
  CHECK_THROWS_AS(classical_simulate(code, FVec{FieldElem(1, 3)}), Error);
}

TEST_CASE("serialization carries every top-level key") {
  UnitNetwork net = expand_capacities(parse_network(load_fixture("butterfly.json")));
  std::string text = serialize_code(construct_any_seed(net, 2));
  for (const char* key : {"steps", "edge_vectors", "decode", "gamma", "basis_edges"})
    CHECK(text.find(key) != std::string::npos);
}
