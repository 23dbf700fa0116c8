// Builds the optimal chain of a model file and prints f(beta) on a few points.
#include <cstdio>
#include <iostream>

#include "ngrem/ngrem.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: solve_model MODEL.json\n";
    return 1;
  }
  try {
    const ngrem::ModelSpec m = ngrem::load_model(argv[1]);
    const ngrem::Chain chain = ngrem::build_optimal_chain(m);
    for (std::size_t k = 1; k <= chain.levels(); ++k)
      std::printf("A_%zu = %s  beta_%zu = %.12g\n", k, ngrem::to_string(chain.sets[k]).c_str(), k,
                  chain.betas[k - 1]);

    const ngrem::FreeEnergyCurve f = ngrem::curve_from_optimal_chain(m, chain);
    for (double beta : {0.5, 1.0, 1.5, 2.0, 3.0}) {
      const auto check = ngrem::solve_variational(m, beta, 1e-10);
      std::printf("beta = %.2f  f = %.12f  variational = %.12f\n", beta, f(beta), check.value);
    }
  } catch (const ngrem::Error& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
}
