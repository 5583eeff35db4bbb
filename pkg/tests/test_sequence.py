import numpy as np
import pytest

from seqcontext.ensembles import all_bit_strings, build_ensemble, build_preparation
from seqcontext.operators import SIGMA_X, build_observables, identity
from seqcontext.sequence import (
    MarginalTable,
    UnsharpSetting,
    closed_form_witness,
    evolve_average,
    kraus_operator,
    marginal_probability,
    noncontextual_bound,
    povm_element,
    projector,
    quality_factor,
    read_marginal_csv,
    run_sequence,
    theta_to_eta,
    visibility_chain,
    witness,
    write_marginal_csv,
)

# independently derived from the quality-factor formula (see scratch oracles)
F_3_06441 = 0.843294198934258
MAX_WITNESS_3 = 0.7886751345948129


def test_setting_validation():
    with pytest.raises(ValueError):
        UnsharpSetting(n=3, y=0, b=0, eta=0.5)
    with pytest.raises(ValueError):
        UnsharpSetting(n=3, y=4, b=0, eta=0.5)
    with pytest.raises(ValueError):
        UnsharpSetting(n=3, y=1, b=2, eta=0.5)
    with pytest.raises(ValueError):
        UnsharpSetting(n=3, y=1, b=0, eta=1.2)


def test_theta_to_eta():
    assert theta_to_eta(0.0) == 0.0
    assert theta_to_eta(np.pi / 2) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        theta_to_eta(-0.3)


def test_povm_element_limits():
    sharp = povm_element(UnsharpSetting(n=3, y=1, b=0, eta=1.0))
    np.testing.assert_allclose(sharp, projector(UnsharpSetting(n=3, y=1, b=0, eta=1.0)), atol=1e-15)
    flat = povm_element(UnsharpSetting(n=3, y=2, b=1, eta=0.0))
    np.testing.assert_allclose(flat, identity(2) / 2, atol=1e-15)


def test_povm_element_experimental_sharpness():
    element = povm_element(UnsharpSetting(n=3, y=1, b=0, eta=0.6441))
    np.testing.assert_allclose(element, (identity(2) + 0.6441 * SIGMA_X) / 2, atol=1e-15)


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("eta", [0.0, 0.3, 0.6441, 1.0])
def test_povm_properties(n, eta):
    obs = build_observables(n)
    for y in range(1, n + 1):
        e0 = povm_element(UnsharpSetting(n=n, y=y, b=0, eta=eta), obs)
        e1 = povm_element(UnsharpSetting(n=n, y=y, b=1, eta=eta), obs)
        np.testing.assert_allclose(e0 + e1, identity(obs.dim), atol=1e-14)
        for e in (e0, e1):
            values = np.linalg.eigvalsh(e)
            assert values[0] >= -1e-14 and values[-1] <= 1 + 1e-14


def test_kraus_limits():
    sharp = kraus_operator(UnsharpSetting(n=3, y=3, b=1, eta=1.0))
    np.testing.assert_allclose(sharp, projector(UnsharpSetting(n=3, y=3, b=1, eta=1.0)), atol=1e-15)
    non_interacting = kraus_operator(UnsharpSetting(n=3, y=3, b=1, eta=0.0))
    np.testing.assert_allclose(non_interacting, identity(2) / np.sqrt(2.0), atol=1e-15)


def test_kraus_experimental_decomposition():
    setting = UnsharpSetting(n=3, y=2, b=1, eta=0.7637)
    keep = projector(setting)
    flip = identity(2) - keep
    expected = np.sqrt(0.88185) * keep + np.sqrt(0.11815) * flip
    np.testing.assert_allclose(kraus_operator(setting), expected, atol=1e-12)


@pytest.mark.parametrize("n", [2, 3, 5])
@pytest.mark.parametrize("eta", [0.0, 0.5, 0.9, 1.0])
def test_kraus_consistency(n, eta):
    obs = build_observables(n)
    for y in range(1, n + 1):
        total = np.zeros((obs.dim, obs.dim), dtype=complex)
        for b in (0, 1):
            setting = UnsharpSetting(n=n, y=y, b=b, eta=eta)
            k = kraus_operator(setting, obs)
            np.testing.assert_allclose(k, k.conj().T, atol=1e-14)
            np.testing.assert_allclose(k.conj().T @ k, povm_element(setting, obs), atol=1e-12)
            total += k.conj().T @ k
        np.testing.assert_allclose(total, identity(obs.dim), atol=1e-12)


def test_evolve_average_trivial_channel():
    rho = build_preparation(3, "010", 0.9).rho
    np.testing.assert_allclose(evolve_average(rho, 0.0, 3), rho, atol=1e-14)


def test_evolve_average_fixed_point():
    mix = identity(2) / 2
    np.testing.assert_allclose(evolve_average(mix, 0.77, 3), mix, atol=1e-14)


def test_evolve_average_matches_quality_factor():
    rho = build_preparation(3, "000", 1.0).rho
    mix = identity(2) / 2
    evolved = evolve_average(rho, 0.6441, 3)
    np.testing.assert_allclose(evolved, F_3_06441 * rho + (1 - F_3_06441) * mix, atol=1e-12)


def test_evolve_average_preserves_trace_and_hermiticity():
    rng = np.random.default_rng(3)
    for n in (2, 3, 4):
        obs = build_observables(n)
        for _ in range(5):
            raw = rng.normal(size=(obs.dim, obs.dim)) + 1j * rng.normal(size=(obs.dim, obs.dim))
            rho = raw @ raw.conj().T
            rho /= np.trace(rho)
            out = evolve_average(rho, float(rng.uniform()), n, obs)
            assert np.trace(out) == pytest.approx(1.0, abs=1e-12)
            np.testing.assert_allclose(out, out.conj().T, atol=1e-12)


def test_evolve_average_rejects_non_density_input():
    with pytest.raises(ValueError):
        evolve_average(np.eye(2), 0.5, 3)  # trace 2
    with pytest.raises(ValueError):
        evolve_average(np.array([[1.5, 0], [0, -0.5]]), 0.5, 3)


def test_marginal_probability_values():
    rho = build_preparation(3, "000", 1.0).rho
    sharp = marginal_probability(rho, UnsharpSetting(n=3, y=1, b=0, eta=1.0))
    assert sharp == pytest.approx(MAX_WITNESS_3, abs=1e-12)
    unsharp = marginal_probability(rho, UnsharpSetting(n=3, y=1, b=0, eta=0.6441))
    assert unsharp == pytest.approx(0.685935654192519, abs=1e-12)
    mix = identity(2) / 2
    assert marginal_probability(mix, UnsharpSetting(n=3, y=2, b=1, eta=0.4)) == pytest.approx(0.5)


def test_marginal_outcomes_sum_to_one():
    rng = np.random.default_rng(5)
    obs = build_observables(4)
    raw = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    rho = raw @ raw.conj().T
    rho /= np.trace(rho)
    for y in range(1, 5):
        p0 = marginal_probability(rho, UnsharpSetting(n=4, y=y, b=0, eta=0.8), obs)
        p1 = marginal_probability(rho, UnsharpSetting(n=4, y=y, b=1, eta=0.8), obs)
        assert p0 + p1 == pytest.approx(1.0, abs=1e-12)


def test_quality_factor():
    assert quality_factor(3, 0.0) == 1.0
    assert quality_factor(3, 1.0) == pytest.approx(1.0 / 3.0)
    assert quality_factor(3, 0.6441) == pytest.approx(F_3_06441, abs=1e-15)
    with pytest.raises(ValueError):
        quality_factor(3, 1.2)


def test_noncontextual_bound():
    assert noncontextual_bound(3) == pytest.approx(2.0 / 3.0)
    assert noncontextual_bound(2) == pytest.approx(0.75)


def test_visibility_chain_experimental_values():
    plan = visibility_chain(3, 1.0, [0.6441, 0.7637, 1.0])
    np.testing.assert_allclose(plan.visibilities, [1.0, 0.843294198934258, 0.6440357573846263], atol=1e-12)
    for predicted in plan.witnesses:
        assert predicted == pytest.approx(0.6859, abs=5e-5)


def test_visibility_chain_degenerate_cases():
    plan = visibility_chain(4, 0.7, [0.0, 0.0, 0.0])
    assert plan.visibilities == (0.7, 0.7, 0.7)
    assert all(a == pytest.approx(0.5) for a in plan.witnesses)

    plan = visibility_chain(3, 0.5, [1.0])
    assert plan.witnesses[0] == pytest.approx(0.6443375672974064, abs=1e-12)


def test_witness_trivial_tables():
    ones = MarginalTable(n=2, win=np.ones((4, 2)))
    assert witness(ones) == 1.0
    half = MarginalTable(n=3, win=np.full((8, 3), 0.5))
    assert witness(half) == 0.5


def test_marginal_table_validation():
    with pytest.raises(ValueError):
        MarginalTable(n=2, win=np.ones((4, 3)))
    with pytest.raises(ValueError):
        MarginalTable(n=2, win=np.full((4, 2), np.nan))
    with pytest.raises(ValueError):
        MarginalTable(n=2, win=np.full((4, 2), 1.7))
    with pytest.raises(ValueError):
        MarginalTable(n=2, win=np.full((4, 2), 0.5), provenance="guessed")


def test_run_sequence_reproduces_experimental_chain():
    tables = run_sequence(3, 1.0, [0.6441, 0.7637, 1.0])
    values = [witness(t) for t in tables]
    for value in values:
        assert value == pytest.approx(0.6859, abs=5e-5)
    assert all(t.provenance == "simulated" for t in tables)


def test_run_sequence_second_observer_after_sharp():
    tables = run_sequence(2, 1.0, [1.0, 1.0])
    assert witness(tables[1]) == pytest.approx(0.6767766952966369, abs=1e-9)


def test_run_sequence_no_signal_at_zero_visibility():
    tables = run_sequence(3, 0.0, [0.5, 0.9])
    for t in tables:
        np.testing.assert_allclose(t.win, 0.5, atol=1e-12)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_run_sequence_matches_closed_form(n):
    rng = np.random.default_rng(40 + n)
    q = float(rng.uniform(0.2, 1.0))
    etas = [float(e) for e in rng.uniform(0.0, 1.0, size=3)]
    plan = visibility_chain(n, q, etas)
    tables = run_sequence(n, q, etas)
    for table, predicted in zip(tables, plan.witnesses):
        assert witness(table) == pytest.approx(predicted, abs=1e-9)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_lemma_states_along_chain(n):
    # channel output must stay in the span {rho_x(1), mix} with the predicted weight
    rng = np.random.default_rng(60 + n)
    obs = build_observables(n)
    mix = identity(obs.dim) / obs.dim
    q = float(rng.uniform(0.1, 1.0))
    etas = [float(e) for e in rng.uniform(0.0, 1.0, size=n)]
    plan = visibility_chain(n, q, etas)
    for x in all_bit_strings(n):
        pure = build_preparation(n, x, 1.0, obs).rho
        state = build_preparation(n, x, q, obs).rho
        for k, eta in enumerate(etas):
            expected = plan.visibilities[k] * pure + (1 - plan.visibilities[k]) * mix
            np.testing.assert_allclose(state, expected, atol=1e-9)
            state = evolve_average(state, eta, n, obs)


def test_evolved_ensemble_keeps_operational_equivalence():
    from seqcontext.ensembles import Ensemble, Preparation, check_operational_equivalence

    ensemble = build_ensemble(3, 0.9)
    obs = build_observables(3)
    evolved = Ensemble(
        n=3,
        q=0.9,
        preparations=tuple(
            Preparation(x=p.x, rho=evolve_average(p.rho, 0.6441, 3, obs)) for p in ensemble.preparations
        ),
        mix=ensemble.mix,
    )
    report = check_operational_equivalence(evolved, tol=1e-10)
    assert report.passed


def test_csv_round_trip(tmp_path):
    table = run_sequence(3, 1.0, [0.6441])[0]
    path = tmp_path / "table.csv"
    write_marginal_csv(table, path)
    loaded = read_marginal_csv(path, provenance="simulated")
    np.testing.assert_allclose(loaded.win, table.win, atol=0)
    assert loaded.sigma is None


def test_csv_round_trip_with_sigma(tmp_path):
    win = np.full((4, 2), 0.25)
    sigma = np.full((4, 2), 0.01)
    table = MarginalTable(n=2, win=win, provenance="recorded", sigma=sigma)
    path = tmp_path / "sig.csv"
    write_marginal_csv(table, path)
    loaded = read_marginal_csv(path)
    np.testing.assert_allclose(loaded.sigma, sigma, atol=0)


def test_csv_rejects_incomplete(tmp_path):
    path = tmp_path / "short.csv"
    path.write_text("x,y,p_win\n00,1,0.5\n00,2,0.5\n01,1,0.5\n")
    with pytest.raises(ValueError, match="incomplete"):
        read_marginal_csv(path)


def test_csv_rejects_duplicates(tmp_path):
    path = tmp_path / "dup.csv"
    rows = ["x,y,p_win"] + [f"{x},{y},0.5" for x in ("00", "01", "10", "11") for y in (1, 2)]
    rows.append("00,1,0.4")
    path.write_text("\n".join(rows) + "\n")
    with pytest.raises(ValueError, match="duplicate"):
        read_marginal_csv(path)


def test_closed_form_witness_consistency():
    assert closed_form_witness(3, 1.0, 1.0) == pytest.approx(MAX_WITNESS_3)
    assert closed_form_witness(3, 0.0, 1.0) == 0.5
