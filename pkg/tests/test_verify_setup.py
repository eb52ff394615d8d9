"""
Tests for the installation check script.
"""

import verify_setup


class TestVerifySetup:
    """The smoke checks pass on a working installation."""

    def test_dependencies_importable(self):
        """No required package is missing."""
        assert verify_setup.check_dependencies() == []

    def test_smoke_checks_pass(self):
        """Every dependency-backed code path works end to end."""
        results = verify_setup.run_smoke_checks()

        assert results == {name: True for name in verify_setup.SMOKE_CHECKS}

    def test_main_exit_code(self, capsys):
        """The script reports success with exit code 0."""
        assert verify_setup.main() == 0
        assert "ALL CHECKS PASSED" in capsys.readouterr().out
