"""
Gets the current version number.
Inside a git checkout it is `git describe` of the latest numeric tag, otherwise
the release version baked into the sources. Records carry it as provenance.
"""

__all__ = ["get_version", "VERSION"]

from functools import lru_cache
from pathlib import Path
import subprocess


VERSION = "0.1.0"


@lru_cache(maxsize=1)
def get_version():
    """Get a version number for a tag, falls back to VERSION."""
    project_root = Path(__file__).resolve().parent.parent
    if not (project_root / ".git").is_dir():
        return VERSION

    cmd = "git describe --tags --match [0-9]*".split()
    try:
        version = subprocess.check_output(cmd, cwd=project_root, stderr=subprocess.DEVNULL).decode().strip()
    except (subprocess.CalledProcessError, OSError):
        return VERSION

    # PEP 440 style post-release for commits after the tag
    if "-" in version:
        version = ".post".join(version.split("-")[:2])
    return version or VERSION
