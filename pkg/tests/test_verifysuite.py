from mmwb import verifysuite
from mmwb.fluctuation import OperatorContext


def test_quick_battery_all_green():
    checks = verifysuite.run_checks(level="quick", seed=0)
    assert checks and all(c["passed"] for c in checks), \
        [c["name"] for c in checks if not c["passed"]]


def test_battery_catches_an_injected_sign_flip(monkeypatch):
    """Flipping the interaction part of xi must trip the variance identity."""
    original = OperatorContext.xi1

    def flipped(self, P):
        out = original(self, P)
        return -out

    monkeypatch.setattr(OperatorContext, "xi1", flipped)
    result = verifysuite.check_variance_identity(seed=0, trials=2, order=1)
    assert not result["passed"]


def test_battery_is_deterministic():
    a = verifysuite.check_variance_identity(seed=3, trials=2, order=1)
    b = verifysuite.check_variance_identity(seed=3, trials=2, order=1)
    assert a == b
