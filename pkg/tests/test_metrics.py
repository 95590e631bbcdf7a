import numpy as np
import pytest

from qss import gaussian as gs
from qss import metrics, protocol
from qss.errors import InconsistentState, InvalidArgument, InvalidState, UndefinedGain
from qss.gaussian import GaussianState, SqueezerSpec
from qss.protocol import AccessStructure as A
from qss.protocol import ReconstructionResult

R3 = np.sqrt(3)


def _result(mean, var, g, structure=A.S12, para=False):
    state = GaussianState(np.asarray(mean, float), np.diag(var))
    return ReconstructionResult(state, g[0], g[1], structure, para)


def test_fidelity_examples():
    assert np.isclose(metrics.fidelity((4, 2), _result((4, 2), (1, 1), (1, 1))), 1.0)
    assert np.isclose(metrics.fidelity((4, 2), _result((4, 2), (3, 3), (1, 1))), 0.5)


def test_fidelity_gain_penalty():
    f = metrics.fidelity_from_moments((4, 2), (0.5, 0.5), (1, 1))
    k = (16 * 0.25 + 4 * 0.25) / 2
    assert np.isclose(f, np.exp(-k / 4))


def test_fidelity_needs_parametric():
    with pytest.raises(InvalidState):
        metrics.fidelity((4, 2), _result((4, 2), (3, 3), (1, 1), A.S23))
    assert np.isclose(metrics.fidelity((4, 2), _result((4, 2), (3, 3), (1, 1), A.S23, True)), 0.5)


def test_optical_gains():
    assert metrics.optical_gains((4, 2), (4, 2)) == (1.0, 1.0)
    assert np.allclose(metrics.optical_gains((4, 2), (4 / np.sqrt(2), 2 / np.sqrt(2))), [0.70711, 0.70711], atol=1e-5)
    gp, gm = metrics.optical_gains((4, 2), (4 * R3, 2 / R3))
    assert np.isclose(gp, R3) and np.isclose(gm, 1 / R3) and np.isclose(gp * gm, 1)
    with pytest.raises(UndefinedGain):
        metrics.optical_gains((0, 2), (0, 2))


def test_signal_transfer_and_noise():
    ideal = _result((4 * R3, 2 / R3), (3, 1 / 3), (R3, 1 / R3), A.S23)
    T, tp, tm = metrics.signal_transfer(gs.coherent(4, 2), ideal)
    assert np.isclose(T, 2) and np.isclose(tp, 1) and np.isclose(tm, 1)
    V, vp, vm = metrics.reconstruction_noise(ideal)
    assert np.isclose(V, 0)
    classical = _result((4 * R3, 2 / R3), (9, 1), (R3, 1 / R3), A.S23)
    assert np.isclose(metrics.signal_transfer(gs.coherent(4, 2), classical)[0], 2 / 3)
    assert np.isclose(metrics.reconstruction_noise(classical)[0], 4)
    with pytest.raises(UndefinedGain):
        metrics.signal_transfer(gs.coherent(0, 2), ideal)


def test_reconstruction_noise_inconsistent():
    with pytest.raises(InconsistentState):
        metrics.reconstruction_noise(_result((4, 2), (1, 1), (1.5, 1)))
    # roundoff-sized negatives are clamped
    V, vp, _ = metrics.reconstruction_noise(_result((4, 2), (1 - 1e-10, 1), (1, 1)))
    assert vp == 0.0 and V == 0.0


def test_duan():
    assert np.isclose(metrics.duan_product(gs.vacuum(2)), 1.0)
    epr = protocol.make_epr(SqueezerSpec(-4.5), SqueezerSpec(-4.5))
    assert np.isclose(metrics.duan_product(epr), 0.12589, atol=1e-5)
    with pytest.raises(InvalidArgument):
        metrics.duan_product(gs.vacuum(1))


def test_classical_bounds():
    b = metrics.classical_bounds(2, 3)
    assert np.isclose(b.avg, 2 / 3) and b.asymmetric == 0.5 and b.mz == 1.0
    assert metrics.classical_bounds(3, 3).avg == 1.0
    assert metrics.classical_bounds(1, 2).avg == 0.5
    for k, n in [(0, 3), (4, 3), (1.5, 3)]:
        with pytest.raises(InvalidArgument):
            metrics.classical_bounds(k, n)


def test_average_fidelity():
    assert metrics.average_fidelity(1, 1, 1) == 1.0
    assert np.isclose(metrics.average_fidelity(0.93, 0.63, 0.63), 0.73)
    assert np.isclose(metrics.average_fidelity(1, 0.5, 0.5), 2 / 3)
    with pytest.raises(InvalidArgument):
        metrics.average_fidelity(1.2, 0.5, 0.5)


def test_infer_through_loss():
    assert metrics.infer_through_loss(1.0, 0.3) == 1.0
    assert np.isclose(metrics.infer_through_loss(2.78, 0.89), 3.0)
    with pytest.raises(InvalidArgument):
        metrics.infer_through_loss(2.0, 0.0)
    state = GaussianState(np.zeros(2), np.diag([3.0, 0.4]))
    lossy = gs.loss_channel(state, 0, 0.7)
    assert np.allclose([metrics.infer_through_loss(v, 0.7) for v in np.diag(lossy.cov)], [3.0, 0.4])


def test_wigner_contour():
    c = metrics.wigner_contour(gs.vacuum(1))
    assert c.center == (0.0, 0.0) and np.allclose(c.semi_axes, [1, 1])
    c = metrics.wigner_contour(GaussianState([4.0, 2.0], 3 * np.eye(2)))
    assert c.center == (4.0, 2.0) and np.allclose(c.semi_axes, [R3, R3])
    c = metrics.wigner_contour(gs.squeezed(SqueezerSpec(-4.5)))
    assert np.allclose(c.semi_axes, [0.5957, 1.6788], atol=1e-4)
    assert np.isclose(c.angle, 0.0)
    rotated = gs.phase_shift(gs.squeezed(SqueezerSpec(-4.5)), 0, np.pi / 2)
    assert np.isclose(metrics.wigner_contour(rotated).angle, np.pi / 2)
    with pytest.raises(InvalidArgument):
        metrics.wigner_contour(gs.vacuum(2))


def test_evaluate_flags(ideal, classical):
    for cfg, beats in ((ideal, True), (classical, False)):
        shares = protocol.dealer_encode(cfg)
        raw = protocol.reconstruct(shares, A.S23, cfg, parametric=False)
        rep = metrics.evaluate(gs.coherent(*cfg.secret_amp), protocol.apply_parametric(raw), tv_result=raw)
        assert rep.beats_F_bound is beats
        assert rep.beats_T_cloning is beats
        assert rep.below_V_unity is beats
