// Command-line front door: configuration, dispatch, report emission.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dsk {

struct RunConfig {
  std::string subcommand;
  std::string input;
  std::string input2;
  std::string output;
  std::string manifest;

  int L = 2;
  double delta = 0.25;
  double sigma = 0.5;
  double rho = 0.0625;
  double eta = 0;        // 0: derive from the input scale
  double lambda = 0.25;
  int k = 1;
  double q = 2.0;
  int h_exp = 8;
  int net_res = 32;
  std::string backend = "rational";  // rational | float
  int threads = 1;
  std::uint64_t seed = 0;

  // generate
  std::string family;
  int d = 1;
  int m = 4;
  std::int64_t count = 1;
  std::uint64_t digit_mask = 0;
  std::string spec_path;

  // uniformize
  std::string mode = "plain";      // plain | valuefn | subspace | center | collapse
  std::string valuefn = "parity";  // parity | dim
  std::vector<int> scales;

  // analyze / verify
  bool auto_uniformize = false;
  int theorem = 2;
  bool demo = false;

  // fup
  std::vector<int> sweep;
  int pr_k = 3;
};

// Exit codes: 0 success, 1 input error, 2 mathematical check failed.
int run(const RunConfig& config);

int run_cli(int argc, char** argv);

}  // namespace dsk
