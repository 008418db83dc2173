"""
tapkit - transport-and-pack toolkit

For backwards compatibility with older pip versions.
Modern installations should use pyproject.toml.
"""

from setuptools import find_packages, setup

# Read requirements
with open("requirements.txt") as f:
    requirements = [line.strip() for line in f if line.strip() and not line.startswith("#")]

setup(
    name="tapkit",
    version="0.1.0",
    packages=find_packages(include=["tapkit*"]),
    install_requires=requirements,
    entry_points={"console_scripts": ["tap = tapkit.cli:main"]},
)
