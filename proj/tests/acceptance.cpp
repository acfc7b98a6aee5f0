// Acceptance harness: one line per criterion, nonzero exit if any fails.
// Usage: acceptance <golden-dir>

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "probmine/verify.hpp"

using namespace probmine;

namespace {

int failures = 0;

void report(int criterion, const std::string& name, bool pass, std::size_t cases,
            long long ms, long long budget_ms, const std::vector<std::string>& detail = {}) {
  bool in_time = ms <= budget_ms;
  if (pass && in_time) {
    std::cout << "PASS criterion=" << criterion << " name=" << name << " cases=" << cases
              << " ms=" << ms << " budget_ms=" << budget_ms << "\n";
    return;
  }
  ++failures;
  for (const auto& d : detail) std::cout << d << "\n";
  std::cout << "FAIL criterion=" << criterion << " name=" << name << " cases=" << cases
            << " ms=" << ms << " budget_ms=" << budget_ms
            << (in_time ? "" : " kind=overtime") << "\n";
}

template <typename F>
void timed(int criterion, const std::string& name, long long budget_ms, F body) {
  auto t0 = std::chrono::steady_clock::now();
  bool pass = true;
  std::size_t cases = 0;
  std::vector<std::string> detail;
  try {
    body(pass, cases, detail);
  } catch (const std::exception& e) {
    pass = false;
    detail.push_back(std::string("FAIL error=\"") + e.what() + "\"");
  }
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - t0)
                .count();
  report(criterion, name, pass, cases, ms, budget_ms, detail);
}

void absorb(const verify::SuiteReport& r, bool& pass, std::size_t& cases,
            std::vector<std::string>& detail) {
  pass = pass && r.pass;
  cases += r.cases;
  detail.insert(detail.end(), r.failures.begin(), r.failures.end());
}

std::map<std::string, std::string> read_golden(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open golden file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    auto colon = line.find(": ");
    if (colon != std::string::npos) kv[line.substr(0, colon)] = line.substr(colon + 2);
  }
  return kv;
}

std::string shape_line(const ProbForm& pf) {
  std::ostringstream os;
  os << to_string(pf.shape);
  if (pf.shape != ProbShape::Other)
    os << " outer=" << pf.outer_name << ":" << pf.outer_type.to_string()
       << " inner=" << pf.inner_name;
  if (pf.shape == ProbShape::Form3) os << " error=" << pf.error_name;
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: acceptance <golden-dir>\n";
    return 2;
  }
  std::string golden_dir = argv[1];
  const std::uint64_t seed = 2024;
  auto fleet = gen::builtin_fleet();

  timed(1, "roundtrip", 5000, [&](bool& pass, std::size_t& cases, auto& detail) {
    absorb(verify::suite_roundtrip(seed, 200, 6), pass, cases, detail);
  });

  timed(2, "interp-equiv", 60000, [&](bool& pass, std::size_t& cases, auto& detail) {
    absorb(verify::suite_interp_equiv(seed, 100), pass, cases, detail);
  });

  timed(3, "outer-oracle", 30000, [&](bool& pass, std::size_t& cases, auto& detail) {
    if (fleet.size() < 5) {
      pass = false;
      detail.push_back("FAIL kind=fleet-too-small");
    }
    bool proper_subalgebra = false;
    for (const auto& lm : fleet) {
      if (lm.space.omega.size() == 4 && lm.space.algebra.size() < 16)
        proper_subalgebra = true;
      absorb(verify::suite_outer_oracle(lm, seed, 200), pass, cases, detail);
    }
    if (!proper_subalgebra) {
      pass = false;
      detail.push_back("FAIL kind=no-proper-subalgebra-model");
    }
  });

  timed(4, "algebra", 60000, [&](bool& pass, std::size_t& cases, auto& detail) {
    for (const auto& lm : fleet) absorb(verify::suite_algebra(lm, seed), pass, cases, detail);
  });

  timed(5, "prenex", 60000, [&](bool& pass, std::size_t& cases, auto& detail) {
    for (const auto& lm : fleet) absorb(verify::suite_prenex(lm, seed), pass, cases, detail);
  });

  timed(6, "sigma", 10000, [&](bool& pass, std::size_t& cases, auto& detail) {
    for (const auto& lm : fleet)
      absorb(verify::suite_sigma(lm, seed, 25, 6), pass, cases, detail);
  });

  timed(7, "fluct", 120000, [&](bool& pass, std::size_t& cases, auto& detail) {
    absorb(verify::suite_fluct(seed, 0), pass, cases, detail);
  });

  timed(8, "modulus", 60000, [&](bool& pass, std::size_t& cases, auto& detail) {
    // ten verified families per fleet model: sixty in total
    for (const auto& lm : fleet)
      absorb(verify::suite_modulus(lm, seed, 10), pass, cases, detail);
  });

  timed(9, "golden-renderings", 5000, [&](bool& pass, std::size_t& cases, auto& detail) {
    for (const char* file : {"form2_plus_two.txt", "form3_plus_three.txt"}) {
      ++cases;
      auto kv = read_golden(golden_dir + "/" + file);
      ProbForm pf = detect_form(parse_formula(kv.at("input")));
      if (shape_line(pf) != kv.at("shape")) {
        pass = false;
        detail.push_back(std::string("FAIL file=") + file + " kind=shape got=\"" +
                         shape_line(pf) + "\"");
        continue;
      }
      ModulusSpec spec = quantitative_interpretation(pf, InterpMode::Classical);
      if (std::string(to_string(spec.kind)) != kv.at("kind")) {
        pass = false;
        detail.push_back(std::string("FAIL file=") + file + " kind=spec-kind got=" +
                         to_string(spec.kind));
      }
      if (print_formula(spec.spec_formula) != kv.at("spec")) {
        pass = false;
        detail.push_back(std::string("FAIL file=") + file + " kind=rendering got=\"" +
                         print_formula(spec.spec_formula) + "\"");
      }
    }
  });

  if (failures) {
    std::cout << "RESULT FAIL criteria_failed=" << failures << "\n";
    return 1;
  }
  std::cout << "RESULT PASS criteria=9\n";
  return 0;
}
