// Free evolution on a chain caps the transfer probability between most node
// pairs strictly below 1. Bang-bang switching against a local control field
// breaks that cap; this demo does it for nodes 1 -> 4 of an xx 7-chain and
// then inspects the effective Hamiltonian the switched evolution generates.

#include <spinitc/spinitc.hpp>

#include <cstdio>

using namespace spinitc;

int main() {
    SpinNetwork net = build_chain(7, CouplingKind::XX);
    Matrix h0 = single_excitation_hamiltonian(net);
    Matrix h1 = control_hamiltonian(net, 0, 2.0);

    Spectrum s = eigendecompose(h0);
    const double cap = max_transfer_probability(s, 0, 3);
    std::printf("free evolution cap for 1 -> 4: p_max = %.9f\n", cap);
    std::printf("(a time scan to t = 1000 stays below it; gap %.2e)\n\n",
                verify_bound_by_scan(s, 0, 3, 1000.0, 0.005));

    OptimizerConfig cfg;
    cfg.restarts = 8;
    ControlSequence seq = optimize_switching(h0, h1, 0, 3, 8, 30.0, cfg);

    std::printf("bang-bang control on node 1 (strength 2.0), 8 segments, horizon 30:\n");
    std::printf("  achieved p = %.9f (seed %llu)\n", seq.achieved_p,
                static_cast<unsigned long long>(seq.seed));
    std::printf("  switch times:");
    for (double t : seq.switch_times) std::printf(" %.4f", t);
    std::printf("\n");

    const double replay = controlled_transfer_probability(h0, h1, seq, 0, 3);
    std::printf("  replayed from the sequence: %.9f (diff %.2e)\n\n", replay,
                std::abs(replay - seq.achieved_p));

    CMatrix u = piecewise_evolution(h0, h1, seq);
    EffectiveHamiltonian eff = effective_hamiltonian(u, seq.final_time);
    const double roundtrip =
        (hermitian_propagator(eff.h_eff, seq.final_time) - u).cwiseAbs().maxCoeff();
    ITCMatrix peff = effective_itc(eff);
    std::printf("effective hamiltonian over the horizon:\n");
    std::printf("  exp(-i h_eff t) reproduces the propagator to %.2e\n", roundtrip);
    std::printf("  effective capacity 1 -> 4: %.9f (free cap was %.9f)\n",
                peff.p_max(0, 3), cap);
    return 0;
}
