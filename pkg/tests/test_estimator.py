import numpy as np
import pytest

from conftest import as_density
from oracle_utils import (
    brute_mutual_information_dm,
    eig2x2,
    random_density_array,
    two_branch_rho,
)
from qdarwin import (
    CorrelatorTable,
    DensityMatrix,
    StateVector,
    all_pauli_strings,
    correlator_table,
    diamond_mutual_information,
    ghz_state,
    mi_curve,
    named_state,
    plan_measurements,
    reconstruct_density,
    star_mutual_information,
    star_parameters,
)
from qdarwin.estimator import STAR_CORRELATORS, StarParameters, branch_eigenvalues, covering_setting

ALL_STRINGS = all_pauli_strings(4)


def ideal_star_table() -> CorrelatorTable:
    return correlator_table(named_state("star-experimental"), ALL_STRINGS)


class TestCorrelatorTable:
    def test_ideal_star_values(self):
        table = correlator_table(named_state("star-experimental"), ["ZZZZ", "IIII", "ZIII"])
        assert table.value("ZZZZ") == pytest.approx(1.0, abs=1e-12)
        assert table.value("IIII") == pytest.approx(1.0, abs=1e-12)
        assert table.value("ZIII") == pytest.approx(0.0, abs=1e-12)

    def test_requires_four_qubits(self):
        with pytest.raises(ValueError, match="4 qubits"):
            correlator_table(ghz_state(3), ["ZZZ"])

    def test_rejects_out_of_range_value(self):
        with pytest.raises(ValueError, match="outside"):
            CorrelatorTable({"ZZZZ": 1.2})

    def test_rejects_bad_identity(self):
        with pytest.raises(ValueError, match="identity"):
            CorrelatorTable({"IIII": 0.9})
        CorrelatorTable({"IIII": (0.9, 0.2)})  # within its sigma

    def test_json_round_trip(self):
        table = CorrelatorTable({"ZIZI": (-0.98, 0.01), "XXYY": (0.5, None)})
        back = CorrelatorTable.from_json_dict(table.to_json_dict())
        assert back.value("ZIZI") == -0.98
        assert back.sigma("ZIZI") == 0.01
        assert back.sigma("XXYY") is None


class TestReconstruction:
    def test_ghz_round_trip(self, ghz4):
        table = correlator_table(ghz4, ALL_STRINGS)
        rho = reconstruct_density(table)
        np.testing.assert_allclose(rho.entries, ghz4.density().entries, atol=1e-10)
        assert rho.physical

    def test_identity_only_table_is_maximally_mixed(self):
        table = CorrelatorTable({s: (1.0 if s.weight == 0 else 0.0) for s in ALL_STRINGS})
        rho = reconstruct_density(table)
        np.testing.assert_allclose(rho.entries, np.eye(16) / 16, atol=1e-12)

    def test_canonical_diamond_round_trip(self):
        state = named_state("diamond-canonical")
        rho = reconstruct_density(correlator_table(state, ALL_STRINGS))
        np.testing.assert_allclose(rho.entries, state.density().entries, atol=1e-10)

    def test_random_mixed_round_trip(self, rng):
        for _ in range(4):
            rho = as_density(random_density_array(4, rng))
            rebuilt = reconstruct_density(correlator_table(rho, ALL_STRINGS))
            np.testing.assert_allclose(rebuilt.entries, rho.entries, atol=1e-9)

    def test_missing_strings_rejected(self):
        table = correlator_table(named_state("star-experimental"), ALL_STRINGS[:100])
        with pytest.raises(ValueError, match="missing"):
            reconstruct_density(table)

    def test_unphysical_flagged(self):
        # a "table" with exaggerated coherence cannot come from a state
        entries = {str(s): 0.0 for s in ALL_STRINGS}
        entries["IIII"] = 1.0
        entries["XXXX"] = 1.0
        entries["YYYY"] = 1.0
        entries["ZZZZ"] = -1.0
        rho = reconstruct_density(CorrelatorTable(entries))
        assert not rho.physical


class TestStarParameters:
    def test_ideal_state_calibration(self):
        params = star_parameters(ideal_star_table())
        assert params.p == pytest.approx(0.5, abs=1e-10)
        assert params.c == pytest.approx(0.5 + 0j, abs=1e-10)
        assert params.consistent

    def test_pure_branch(self):
        table = correlator_table(StateVector.computational_basis("0101"), ALL_STRINGS)
        params = star_parameters(table)
        assert params.p == pytest.approx(1.0, abs=1e-10)
        assert abs(params.c) == pytest.approx(0.0, abs=1e-10)
        assert params.consistent

    def test_maximally_mixed_flagged(self):
        table = correlator_table(DensityMatrix.maximally_mixed(4), ALL_STRINGS)
        params = star_parameters(table)
        assert params.p == pytest.approx(1 / 16, abs=1e-10)
        assert abs(params.c) == pytest.approx(0.0, abs=1e-10)
        assert not params.consistent  # branch populations do not sum to one

    def test_recovers_generic_two_branch_state(self, rng):
        for p in np.linspace(0.1, 0.9, 9):
            c_max = np.sqrt(p * (1 - p))
            for c in (0.0, 0.5 * c_max, c_max * np.exp(0.4j), -0.9j * c_max):
                rho = as_density(two_branch_rho(float(p), complex(c)))
                params = star_parameters(correlator_table(rho, ALL_STRINGS))
                assert params.p == pytest.approx(float(p), abs=1e-10)
                assert params.c == pytest.approx(complex(c), abs=1e-10)

    def test_missing_strings(self):
        table = correlator_table(named_state("star-experimental"), ["ZZZZ"])
        with pytest.raises(ValueError, match="missing"):
            star_parameters(table)

    def test_sigma_propagation(self):
        entries = {s: (v, 0.01) for s, (v, _) in ideal_star_table().entries.items()}
        entries["IIII"] = (1.0, 0.01)
        params = star_parameters(CorrelatorTable(entries))
        assert params.sigma_p == pytest.approx(0.01 * 4 / 16)  # sqrt(16 sigmas) / 16
        assert params.sigma_c == pytest.approx(0.01 * 4 / 16)


class TestClosedFormMutualInformation:
    def test_ideal_star_curve(self):
        params = star_parameters(ideal_star_table())
        assert star_mutual_information(params, 1) == pytest.approx(1.0, abs=1e-9)
        assert star_mutual_information(params, 2) == pytest.approx(1.0, abs=1e-9)
        assert star_mutual_information(params, 3) == pytest.approx(2.0, abs=1e-9)

    def test_pure_branch_has_no_correlations(self):
        params = StarParameters(p=1.0, c=0.0)
        for delta in (1, 2, 3):
            assert star_mutual_information(params, delta) == pytest.approx(0.0, abs=1e-12)

    def test_branch_eigenvalues_consistent(self):
        for p in np.linspace(0.05, 0.95, 7):
            c = 0.8 * np.sqrt(p * (1 - p)) * np.exp(1.3j)
            params = StarParameters(p=float(p), c=complex(c))
            f_plus, f_minus = branch_eigenvalues(params)
            assert f_plus + f_minus == pytest.approx(1.0, abs=1e-12)
            assert (f_plus, f_minus) == pytest.approx(eig2x2(float(p), complex(c)), abs=1e-10)

    def test_agrees_with_exact_matrix(self):
        # closed form vs dense-loop oracle over a (P, C) grid
        env = {1: (2,), 2: (2, 3), 3: (2, 3, 4)}
        for p in np.linspace(0.1, 0.9, 9):
            for frac in (0.0, 0.4, 0.8, 1.0):
                c = frac * np.sqrt(p * (1 - p))
                rho = two_branch_rho(float(p), complex(c))
                params = StarParameters(p=float(p), c=complex(c))
                for delta, frag in env.items():
                    exact = brute_mutual_information_dm(rho, 1, frag, 4)
                    assert star_mutual_information(params, delta) == pytest.approx(
                        exact, abs=1e-8
                    )

    def test_delta_validation(self):
        with pytest.raises(ValueError, match="delta"):
            star_mutual_information(StarParameters(p=0.5, c=0.5), 4)

    def test_inconsistent_inputs_rejected(self):
        bad = StarParameters(p=0.2, c=0.9)
        with pytest.raises(ValueError, match="two-branch"):
            star_mutual_information(bad, 3)

    def test_uncorrected_variant(self):
        # the legacy form coincides at the symmetric ideal point ...
        ideal = StarParameters(p=0.5, c=0.5)
        assert star_mutual_information(ideal, 3, uncorrected=True) == pytest.approx(2.0, abs=1e-9)
        f_plus, f_minus = branch_eigenvalues(ideal, uncorrected=True)
        assert (f_plus, f_minus) == pytest.approx((0.5, -0.5), abs=1e-12)
        # ... but is inconsistent elsewhere: eigenvalues no longer sum to one
        skew = StarParameters(p=0.3, c=0.25)
        f_plus, f_minus = branch_eigenvalues(skew, uncorrected=True)
        assert f_plus + f_minus == pytest.approx(2 * 0.3 - 1.0, abs=1e-12)
        legacy = star_mutual_information(skew, 3, uncorrected=True)
        corrected = star_mutual_information(skew, 3)
        exact = brute_mutual_information_dm(two_branch_rho(0.3, 0.25), 1, (2, 3, 4), 4)
        assert corrected == pytest.approx(exact, abs=1e-9)
        assert abs(legacy - exact) > 0.1


class TestMeasurementPlan:
    def test_star_budget(self):
        plan = plan_measurements("star")
        assert plan.counts == {"n_correlators": 32, "n_settings": 17}
        assert len(plan.correlators) == 32
        assert len(plan.settings) == 17

    def test_star_families(self):
        weights = sorted(
            "".join(sorted(s.labels)) for s in STAR_CORRELATORS
        )
        by_family = {}
        for s in STAR_CORRELATORS:
            by_family.setdefault("".join(sorted(s.labels)), []).append(s)
        sizes = {family: len(group) for family, group in by_family.items()}
        assert sizes == {
            "IIII": 1, "ZZZZ": 1, "IIIZ": 4, "IIZZ": 6, "IZZZ": 4,
            "XXXX": 1, "YYYY": 1, "XXXY": 4, "XYYY": 4, "XXYY": 6,
        }
        assert len(weights) == 32

    def test_settings_cover_all_correlators(self):
        plan = plan_measurements("star")
        settings = set(plan.settings)
        assert len(settings) == len(plan.settings)  # pairwise distinct
        for corr in plan.correlators:
            assert covering_setting(corr) in settings
            full = covering_setting(corr)
            assert all(c == "I" or c == f for c, f in zip(corr.labels, full.labels))

    def test_zzzz_covers_the_diagonal_family(self):
        plan = plan_measurements("star")
        diagonal = [s for s in plan.correlators if set(s.labels) <= {"I", "Z"}]
        assert len(diagonal) == 16
        assert all(str(covering_setting(s)) == "ZZZZ" for s in diagonal)

    def test_full_tomography(self):
        plan = plan_measurements("full_tomography")
        assert plan.counts == {"n_correlators": 255, "n_settings": 81, "n_projectors": 1296}
        assert all(s.weight > 0 for s in plan.correlators)

    def test_unknown_target(self):
        with pytest.raises(ValueError, match="target"):
            plan_measurements("bell")

    def test_json_shape(self):
        data = plan_measurements("star").to_json_dict()
        assert set(data) == {"correlators", "settings", "counts"}
        assert data["counts"]["n_correlators"] == 32


class TestDiamondPipeline:
    def test_ideal_canonical_table(self):
        table = correlator_table(named_state("diamond-canonical"), ALL_STRINGS)
        curve = diamond_mutual_information(table, 1)
        assert curve.mean_values() == pytest.approx([1 / 3, 5 / 3, 2.0], abs=1e-9)

    def test_matches_direct_computation(self):
        state = named_state("diamond-canonical")
        table = correlator_table(state, ALL_STRINGS)
        direct = mi_curve(state, 1)
        pipeline = diamond_mutual_information(table, 1)
        for a, b in zip(direct.points, pipeline.points):
            assert b.mean_mi == pytest.approx(a.mean_mi, abs=1e-9)

    def test_star_table_through_same_path(self):
        table = correlator_table(named_state("star-experimental"), ALL_STRINGS)
        curve = diamond_mutual_information(table, 1)
        assert curve.mean_values() == pytest.approx([1.0, 1.0, 2.0], abs=1e-9)

    def test_maximally_mixed_gives_zero_curve(self):
        table = correlator_table(DensityMatrix.maximally_mixed(4), ALL_STRINGS)
        curve = diamond_mutual_information(table, 1)
        assert curve.mean_values() == pytest.approx([0.0, 0.0, 0.0], abs=1e-9)

    def test_unphysical_beyond_tolerance_rejected(self):
        entries = {str(s): 0.0 for s in ALL_STRINGS}
        entries["IIII"] = 1.0
        entries["XXXX"] = 1.0
        entries["YYYY"] = 1.0
        entries["ZZZZ"] = -1.0
        table = CorrelatorTable(entries)  # spectrum reaches -1/8
        with pytest.raises(ValueError, match="projection tolerance"):
            diamond_mutual_information(table, 1, negativity_tol=0.05)
        # within a generous tolerance the same table is projected and analyzed
        curve = diamond_mutual_information(table, 1, negativity_tol=0.25)
        assert all(v >= 0 for v in curve.mean_values())
