from bftk.core.config import Settings
from bftk.core.errors import ArityCapError, BftkError, CertificateError, InfeasibleSchemeError


class TestSettings:
    def test_environment_overrides(self, monkeypatch):
        monkeypatch.setenv("BFTK_TOLERANCE", "1e-3")
        monkeypatch.setenv("BFTK_JOBS", "0")
        monkeypatch.setenv("BFTK_FORMAT", "xml")
        cfg = Settings()
        assert cfg.TOLERANCE == 1e-3
        assert cfg.JOBS == 1
        assert cfg.OUTPUT_FORMAT == "json"

    def test_command_line_override_copies(self):
        base = Settings()
        cfg = base.override(tolerance=1e-9, seed=5, output_format="CSV")
        assert (cfg.TOLERANCE, cfg.SEED, cfg.OUTPUT_FORMAT) == (1e-9, 5, "csv")
        assert base.SEED != 5 or base.TOLERANCE != 1e-9

    def test_debug_follows_environment(self, monkeypatch):
        monkeypatch.setenv("BFTK_ENVIRONMENT", "production")
        cfg = Settings()
        assert not cfg.DEBUG and not cfg.is_development


class TestErrors:
    def test_exit_codes(self):
        assert ArityCapError("bs", 7, 6).exit_code == 2
        assert CertificateError("x").exit_code == 1
        assert isinstance(ArityCapError("bs", 7, 6), ValueError)

    def test_messages(self):
        assert str(ArityCapError("bs", 7, 6)) == "bs: arity 7 exceeds cap 6"
        err = InfeasibleSchemeError(3, 0, 0.25)
        assert isinstance(err, BftkError) and "bit 1" in str(err)
