// Copyright 2026 The qsgain Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch_amalgamated.hpp>

#include "../support.hpp"

using namespace qsgain;

TEST_CASE("model files load") {
  const QuantumModel m = io::load_model(testing::data_path("opa_stable.json"));
  const OpaSystem s = build_opa_model({0.1, 2.0, 4.0, 1.0, 1.0});
  CHECK(max_abs(CMatrix(m.M() - s.model.M())) < 1e-15);
  CHECK(max_abs(CMatrix(m.N_a() - s.model.N_a())) < 1e-15);
  CHECK(max_abs(CMatrix(m.N_b() - s.model.N_b())) < 1e-15);
  CHECK(max_abs(CMatrix(m.E_tilde() - s.model.E_tilde())) == 0.0);

  const LinearUncertainty u = io::load_uncertainty(testing::data_path("opa_uncertainty.json"));
  CHECK(max_abs(CMatrix(u.C_u - s.uncertainty.C_u)) < 1e-15);
}

TEST_CASE("model round trip is exact") {
  Rng rng(5);
  for (int t = 0; t < 5; ++t) {
    const QuantumModel m = testing::random_model(1 + t % 3, rng);
    const QuantumModel back = io::parse_model(io::dump(io::model_json(m)));
    CHECK(back.M() == m.M());
    CHECK(back.N_a() == m.N_a());
    CHECK(back.N_b() == m.N_b());
    CHECK(back.E_tilde() == m.E_tilde());
  }
  const LinearUncertainty u = from_bilinear_coupling(Complex(0.3, -0.7), 1.3);
  const LinearUncertainty ub = io::parse_uncertainty(io::dump(io::uncertainty_json(u)));
  CHECK(ub.C_u == u.C_u);
  CHECK(ub.NoiseCov == u.NoiseCov);
}

TEST_CASE("syntax errors report line and column") {
  const std::string text = "{\n  \"n_a\": 1,\n  \"n_b\": 1,,\n}";
  try {
    io::parse_model(text, "bad.json");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() == 12);
    CHECK(std::string(e.what()).find("bad.json:3:12") != std::string::npos);
  }
}

TEST_CASE("schema is strict") {
  const std::string base = io::dump(io::model_json(build_opa_model({0.1, 2.0, 4.0, 1.0, 1.0}).model));
  io::Json doc = io::Json::parse(base);
  doc["extra"] = 1;
  CHECK_THROWS_AS(io::parse_model(doc.dump()), ParseError);
  doc = io::Json::parse(base);
  doc.erase("M");
  CHECK_THROWS_AS(io::parse_model(doc.dump()), ParseError);
  doc = io::Json::parse(base);
  doc["n_a"] = 0;
  CHECK_THROWS_AS(io::parse_model(doc.dump()), ParseError);
  doc = io::Json::parse(base);
  doc["M"][0][0] = "x";
  CHECK_THROWS_AS(io::parse_model(doc.dump()), ParseError);
  doc = io::Json::parse(base);
  doc["M"][0][1] = io::Json::array({0.0, 0.5});
  CHECK_THROWS_AS(io::parse_model(doc.dump()), ModelError);
  CHECK_THROWS_AS(io::parse_model("[]"), ParseError);
  CHECK_THROWS_AS(io::load_model("/nonexistent/model.json"), ParseError);
}

TEST_CASE("bare numbers are real entries") {
  const QuantumModel m = io::parse_model(R"({"n_a": 1, "n_b": 1,
    "M": [[1, 0], [0, 1]], "N_a": [[1, 0], [0, 1]], "N_b": [[1, 0], [0, 1]],
    "E_tilde": [[1, 0]]})");
  CHECK(m.M()(0, 0) == Complex(1.0, 0.0));
}

TEST_CASE("report formatting") {
  CHECK(io::fmt17(0.1) == "0.10000000000000001");
  CHECK(io::fmt17(kInf) == "inf");
  CHECK(io::fmt17(Complex(1.0, -2.0)) == "1 - 2i");
  CHECK(io::number(kInf) == "inf");
  const CertificationReport r = certify(build_opa_model({0.1, 2.0, 4.0, 1.0, 1.0}).model, 50.0, 0.04, 0.0);
  const io::OrderedJson j = io::report_json(r);
  CHECK(j["verdict"] == "certified");
  CHECK(j["mu_coefficient"] == 2.0);
  CHECK(j["P"]["method"].is_string());
  const io::OrderedJson g = io::report_json(certify(build_opa_model({0.1, 2.0, 4.0, 1.0, 1.0}).model, kInf, 0.0, 0.0));
  CHECK(g["gamma"] == "inf");
  CHECK(io::report_text(r).find("certified") != std::string::npos);
}
