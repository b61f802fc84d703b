from setuptools import setup, find_packages

with open("requirements.txt") as handle:
    requirements = [line.strip() for line in handle if line.strip() and not line.startswith("pytest")]

setup(
    name="srqa",
    version="1.0.0",
    packages=find_packages(exclude=("tests", "tests.*")),
    install_requires=requirements,
    entry_points={"console_scripts": ["srqa=srqa.cli:cli"]},
    python_requires=">=3.9",
)
