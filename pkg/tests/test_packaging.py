import re
try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib


def _project_version():
    with open("pyproject.toml", "rb") as f:
        return tomllib.load(f)["project"]["version"]


def test_install_script_reads_version_from_pyproject():
    with open("install_speakerly.sh", "r", encoding="utf-8") as f:
        script = f.read()

    assert _project_version() not in script
    assert "pyproject.toml" in script
    assert re.search(r'dist/speakerly-\$VERSION-py3-none-any\.whl', script)
