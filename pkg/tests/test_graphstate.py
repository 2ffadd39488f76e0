from math import pi, sqrt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracle_utils import ket
from qdarwin import (
    Gate,
    GraphSpec,
    StateVector,
    apply_circuit,
    build_graph_state,
    check_local_equivalence,
    diamond_canonical_check,
    diamond_spec,
    evolve_ising,
    ghz_state,
    mutual_information,
    named_state,
    star_ghz_check,
    star_spec,
    states_equal_up_to_phase,
)


class TestGraphSpec:
    def test_rejects_duplicate_edges(self):
        with pytest.raises(ValueError, match="duplicate"):
            GraphSpec(3, 1, ((1, 2, pi), (2, 1, 0.5)))

    def test_rejects_self_edge(self):
        with pytest.raises(ValueError, match="self-edge"):
            GraphSpec(3, 1, ((2, 2, pi),))

    def test_rejects_bad_system(self):
        with pytest.raises(ValueError, match="system"):
            GraphSpec(3, 4, ())

    def test_rejects_nonfinite_phase(self):
        with pytest.raises(ValueError, match="finite"):
            GraphSpec(2, 1, ((1, 2, float("nan")),))

    def test_dict_round_trip(self):
        spec = diamond_spec(3, pi, 0.3)
        assert GraphSpec.from_dict(spec.to_dict()) == spec


class TestSpecFactories:
    def test_star_shape(self):
        spec = star_spec(3, pi)
        assert spec.n_qubits == 4
        assert spec.system == 1
        assert spec.edges == ((1, 2, pi), (1, 3, pi), (1, 4, pi))

    def test_star_ten_qubits(self):
        spec = star_spec(9, pi)
        assert spec.n_qubits == 10
        assert len(spec.edges) == 9
        assert all(j == 1 for j, _, _ in spec.edges)

    def test_star_minimal(self):
        assert star_spec(1, pi).edges == ((1, 2, pi),)

    def test_star_requires_environment(self):
        with pytest.raises(ValueError):
            star_spec(0, pi)

    def test_diamond_adds_open_chain(self):
        spec = diamond_spec(3, pi, pi)
        assert set((j, k) for j, k, _ in spec.edges) == {(1, 2), (1, 3), (1, 4), (2, 3), (3, 4)}

    def test_diamond_ten_qubits(self):
        spec = diamond_spec(9, pi, pi)
        chain = [(j, k) for j, k, _ in spec.edges if j != 1]
        assert chain == [(j, j + 1) for j in range(2, 10)]

    def test_diamond_requires_two_env(self):
        with pytest.raises(ValueError):
            diamond_spec(1, pi, pi)


class TestBuildGraphState:
    def test_two_qubit_cluster(self):
        state = build_graph_state(GraphSpec(2, 1, ((1, 2, pi),)))
        expected = (ket("00") + ket("01") + ket("10") - ket("11")) / 2
        np.testing.assert_allclose(state.amplitudes, expected, atol=1e-12)

    def test_zero_phases_give_plus_product(self):
        state = build_graph_state(GraphSpec(3, 1, ((1, 2, 0.0), (2, 3, 0.0))))
        np.testing.assert_allclose(state.amplitudes, np.full(8, 1 / sqrt(8)), atol=1e-12)

    def test_star_becomes_ghz_under_hadamards(self):
        state = build_graph_state(star_spec(3, pi))
        rotated = apply_circuit(state, [Gate.hadamard(q) for q in (2, 3, 4)])
        assert states_equal_up_to_phase(rotated, ghz_state(4))

    def test_diamond_theta_zero_equals_star(self):
        a = build_graph_state(diamond_spec(4, pi, 0.0))
        b = build_graph_state(star_spec(4, pi))
        np.testing.assert_allclose(a.amplitudes, b.amplitudes, atol=1e-12)

    @settings(max_examples=20, deadline=None)
    @given(st.permutations(list(range(5))))
    def test_edge_order_irrelevant(self, order):
        edges = list(diamond_spec(3, 1.1, 0.7).edges)
        base = build_graph_state(diamond_spec(3, 1.1, 0.7))
        shuffled = build_graph_state(GraphSpec(4, 1, tuple(edges[i] for i in order)))
        np.testing.assert_allclose(shuffled.amplitudes, base.amplitudes, atol=1e-12)


class TestEvolveIsing:
    def test_single_pair_matches_cluster(self):
        evolved = evolve_ising(2, {(1, 2): pi}, 1.0)
        cluster = build_graph_state(GraphSpec(2, 1, ((1, 2, pi),)))
        assert states_equal_up_to_phase(evolved, cluster, tol=1e-10)

    def test_zero_time_is_plus_product(self):
        state = evolve_ising(3, {(1, 2): 0.9, (2, 3): 0.4}, 0.0)
        np.testing.assert_allclose(state.amplitudes, StateVector.plus_state(3).amplitudes, atol=1e-12)

    def test_star_couplings_match_graph_state(self):
        evolved = evolve_ising(5, {(1, k): pi for k in range(2, 6)}, 1.0)
        graph = build_graph_state(star_spec(4, pi))
        assert states_equal_up_to_phase(evolved, graph, tol=1e-10)

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 10**6))
    def test_matches_negated_phase_network(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 5))
        pairs = [(j, k) for j in range(1, n + 1) for k in range(j + 1, n + 1)]
        couplings = {p: float(rng.uniform(-2, 2)) for p in pairs if rng.random() < 0.7}
        t = float(rng.uniform(0.1, 3.0))
        evolved = evolve_ising(n, couplings, t)
        edges = tuple((j, k, -g * t) for (j, k), g in couplings.items())
        network = build_graph_state(GraphSpec(n, 1, edges))
        assert states_equal_up_to_phase(evolved, network, tol=1e-10)

    def test_rejects_duplicate_pair(self):
        with pytest.raises(ValueError, match="twice"):
            evolve_ising(2, {(1, 2): 1.0, (2, 1): 1.0}, 1.0)

    def test_rejects_self_pair(self):
        with pytest.raises(ValueError, match="self"):
            evolve_ising(2, {(1, 1): 1.0}, 1.0)


class TestNamedStates:
    def test_hyperentangled_source(self):
        expected = (ket("0001") + ket("0010") + ket("1101") + ket("1110")) / 2
        np.testing.assert_allclose(named_state("hyperentangled-xi").amplitudes, expected, atol=1e-12)

    def test_star_experimental(self):
        expected = (ket("0101") + ket("1010")) / sqrt(2)
        np.testing.assert_allclose(named_state("star-experimental").amplitudes, expected, atol=1e-12)

    def test_diamond_canonical(self):
        expected = (-ket("0001") + ket("0110") + ket("1010") + ket("1101")) / 2
        np.testing.assert_allclose(named_state("diamond-canonical").amplitudes, expected, atol=1e-12)

    def test_diamond_experimental_coincides_with_canonical(self):
        np.testing.assert_allclose(
            named_state("diamond-experimental").amplitudes,
            named_state("diamond-canonical").amplitudes,
            atol=1e-12,
        )

    def test_parameterized_families(self):
        star = named_state("star", n_env=3, phi=pi)
        np.testing.assert_allclose(star.amplitudes, build_graph_state(star_spec(3, pi)).amplitudes)
        assert named_state("ghz", n_qubits=5).n_qubits == 5
        assert named_state("GHZ4").n_qubits == 4

    def test_unknown_name(self):
        with pytest.raises(ValueError, match="unknown"):
            named_state("pentagon")


class TestLocalEquivalence:
    def test_star_ghz_identity(self):
        report = star_ghz_check()
        assert report.passed
        assert report.fidelity == pytest.approx(1.0, abs=1e-9)

    def test_diamond_canonical_identity(self):
        report = diamond_canonical_check()
        assert report.passed
        assert report.fidelity == pytest.approx(1.0, abs=1e-9)

    def test_empty_circuit_self_equivalence(self, ghz4):
        report = check_local_equivalence(ghz4, ghz4, [])
        assert report.fidelity == pytest.approx(1.0, abs=1e-12)

    def test_star_experimental_is_ghz_up_to_bit_flips(self, ghz4):
        report = check_local_equivalence(
            named_state("star-experimental"), ghz4, [Gate.pauli_x(2), Gate.pauli_x(4)]
        )
        assert report.passed

    def test_rejects_entangling_gate(self, ghz4):
        with pytest.raises(ValueError, match="entangling"):
            check_local_equivalence(ghz4, ghz4, [Gate.controlled_phase(pi, 1, 2)])

    def test_swap_is_allowed(self, ghz4):
        report = check_local_equivalence(ghz4, ghz4, [Gate.swap(2, 3)])
        assert report.passed

    def test_mismatched_sizes(self, ghz4):
        with pytest.raises(ValueError, match="equal"):
            check_local_equivalence(ghz4, StateVector.plus_state(3), [])


class TestStarGhzMutualInformationEquality:
    @pytest.mark.parametrize("n_env", [3, 9])
    def test_every_fragment_matches(self, n_env):
        import itertools

        star = build_graph_state(star_spec(n_env, pi))
        ghz = ghz_state(n_env + 1)
        env = range(2, n_env + 2)
        for delta in range(1, n_env + 1):
            for frag in itertools.combinations(env, delta):
                assert mutual_information(star, 1, frag) == pytest.approx(
                    mutual_information(ghz, 1, frag), abs=1e-9
                )
