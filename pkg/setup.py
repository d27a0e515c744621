"""Recency-weighted Markov inference"""

import os
import sys

import setuptools

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
import pyrecency  # noqa: E402

with open("README.md", "r") as fh:
    LONG_DESCRIPTION = fh.read()

setuptools.setup(
    name="pyrecency",
    version=pyrecency.__version__,
    description="Recency-weighted high-order Markov inference with fixed time and memory",
    long_description=LONG_DESCRIPTION,
    long_description_content_type="text/markdown",
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "License :: OSI Approved :: Apache Software License",
    ],
    keywords="particle_filter sequential_monte_carlo markov_chain",
    packages=["pyrecency"],
    python_requires=">=3.8",
    tests_require=["pytest", "pytest-cov", "pyfakefs", "pylint", "mypy"],
    install_requires=["numpy", "scipy", "colorama"],
    entry_points={"console_scripts": ["pyrecency=pyrecency.run:main"]},
)
