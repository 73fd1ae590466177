#!/usr/bin/env python

"""ell_calogero setup."""
from pathlib import Path
from setuptools import setup

VERSION = "0.1.0"

setup(
    name="ell_calogero",
    version=VERSION,
    description="Exact perturbative energy spectra of the quantum elliptic Calogero-Sutherland model of type A_n",
    long_description=Path("README.md").read_text(),
    long_description_content_type="text/markdown",
    license="MIT",
    python_requires=">=3.8",
    install_requires=[
        "numpy",
        "scipy",
        "sympy",
        "python-configuration",
        "pyyaml",
    ],
    extras_require={
        "test": ["pytest"],
    },
    zip_safe=True,
)
