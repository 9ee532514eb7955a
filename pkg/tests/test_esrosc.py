"""Tests for esrosc package structure."""

import ast
import sys
from pathlib import Path

import pytest

PROJECT_ROOT = Path(__file__).parent.parent
PACKAGE_DIR = PROJECT_ROOT / "esrosc"


def test_package_import():
    """Test that the package can be imported."""
    import esrosc

    assert esrosc.__version__
    assert esrosc.ESRSimulator is not None


def test_python_version():
    """Test Python version compatibility."""
    assert sys.version_info >= (3, 9)


class TestPackageStructure:
    """Test package structure and configuration."""

    def test_package_directory_exists(self):
        assert PACKAGE_DIR.is_dir()

    def test_pyproject_toml_exists(self):
        assert (PROJECT_ROOT / "pyproject.toml").exists()

    @pytest.mark.parametrize("subpackage", [
        "core", "detectors", "formatters", "observables", "sampling", "utils",
    ])
    def test_subpackages_have_init(self, subpackage):
        assert (PACKAGE_DIR / subpackage / "__init__.py").exists()

    def test_sources_parse(self):
        """Every module is valid Python."""
        for path in PACKAGE_DIR.rglob("*.py"):
            ast.parse(path.read_text(encoding="utf-8"), filename=str(path))

    def test_version_matches_pyproject(self):
        import esrosc

        text = (PROJECT_ROOT / "pyproject.toml").read_text(encoding="utf-8")
        assert f'version = "{esrosc.__version__}"' in text


@pytest.mark.parametrize("required_file", [
    "README.md",
    "pyproject.toml",
    "DESIGN.md",
])
def test_required_files_exist(required_file):
    """Test that required project files exist."""
    file_path = PROJECT_ROOT / required_file
    assert file_path.exists(), f"{required_file} not found"
