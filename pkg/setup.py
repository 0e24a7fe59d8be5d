#!/usr/bin/env python
"""
dst-tomo
Direct state tomography of a qubit with Cramer-Rao analysis,
Monte-Carlo ensemble sweeps and a SIC-POVM baseline.
"""

from setuptools import setup, find_packages
import pathlib

# Read the README file
here = pathlib.Path(__file__).parent.resolve()
long_description = (here / "README.md").read_text(encoding="utf-8")

setup(
    name="dst-tomo",
    version="0.1.0",
    description="Direct state tomography of a qubit: effective bases, reconstruction, Cramer-Rao bounds and SIC-POVM comparison",
    long_description=long_description,
    long_description_content_type="text/markdown",
    author="dst-tomo developers",
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Physics",
        "License :: OSI Approved :: BSD License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
    ],
    keywords="quantum, tomography, qubit, weak measurement, cramer-rao, sic-povm",
    packages=find_packages(exclude=["tests"]),
    python_requires=">=3.9",
    install_requires=[
        "numpy>=1.20.0",
        "sqlalchemy>=2.0.0",
    ],
    extras_require={
        "postgresql": ["psycopg[binary]>=3.0"],
        "mysql": ["pymysql>=1.0.0"],
        "dev": ["pytest>=7.0", "hypothesis>=6.0", "scipy>=1.7", "black", "flake8"],
    },
    entry_points={
        "console_scripts": ["dst-tomo=dst_tomo.cli:main"],
    },
)
