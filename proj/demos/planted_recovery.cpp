// Joint learning on a seeded planted instance: prints the g(q) trace and
// compares the learned triangles with the planted ones.

#include <cstdlib>
#include <iostream>

#include <tsp/tsp.hpp>

int main(int argc, char** argv)
{
    const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 7;
    const auto inst = tsp::gen_planted_instance(tsp::PlantedSpec{}, seed);

    tsp::JointLearnConfig cfg;
    cfg.alpha1 = cfg.alpha2 = 1.5 * inst.harm_l1;
    const auto res = tsp::learn_joint(inst.Y, inst.complex, cfg);

    std::cout << "E = " << inst.complex.n_edges() << ", candidates = " << res.candidates.size() << "\n";
    for (const auto& t : res.trace)
        if (t.q <= 12) std::cout << "g(" << t.q << ") = " << t.g << "\n";
    std::cout << "q* = " << res.q_star << "\nplanted:";
    for (const auto& t : inst.planted_triangles) std::cout << ' ' << tsp::to_string(t);
    std::cout << "\nlearned:";
    for (const auto& t : res.selected_triangles) std::cout << ' ' << tsp::to_string(t);
    std::cout << "\n";
}
