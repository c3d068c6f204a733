// Hodge decomposition, divergence and curl on the smallest filled triangle.

#include <iostream>

#include <tsp/tsp.hpp>

int main()
{
    const auto cx = tsp::build_complex(3, {{0, 1}, {0, 2}, {1, 2}}, {{0, 1, 2}});
    const auto inc = tsp::incidence(cx);
    std::cout << "B1 =\n" << inc.b1 << "\nB2 =\n" << inc.b2 << "\n\n";

    const auto spec = tsp::partition_subspaces(inc);
    const auto d = spec.dims();
    std::cout << "dims (grad, curl, harm) = " << d.gradient << ", " << d.curl << ", " << d.harmonic << "\n";

    Eigen::VectorXd flow(3);
    flow << 2.0, 1.0, 2.0;  // gradient [1,2,1] plus circulation [1,-1,1]
    const auto parts = tsp::hodge_decompose(spec, flow);
    std::cout << "irrotational: " << parts.irrotational.transpose() << "\n"
              << "solenoidal:   " << parts.solenoidal.transpose() << "\n"
              << "harmonic:     " << parts.harmonic.transpose() << "\n"
              << "div:          " << tsp::divergence(inc, flow).transpose() << "\n"
              << "curl:         " << tsp::curl(inc, flow).transpose() << "\n";
}
