"""Setup script for the BlazeFace desk stack."""

from setuptools import setup, find_packages

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()


def read_requirements(path="requirements.txt"):
    """Split requirements.txt into runtime and dev groups at the '# Testing' header."""
    runtime, dev = [], []
    target = runtime
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line.startswith("# Testing"):
                target = dev
            if line and not line.startswith("#"):
                target.append(line)
    return runtime, dev


install_requires, dev_requires = read_requirements()

setup(
    name="blazeface-desk",
    version="1.0.0",
    author="Your Name",
    author_email="your.email@example.com",
    description="CPU reference BlazeFace face detector with evaluation, jitter and cost analysis tools",
    long_description=long_description,
    long_description_content_type="text/markdown",
    url="https://github.com/yourusername/blazeface-desk",
    packages=find_packages(exclude=["tests", "tests.*"]),
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Image Recognition",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
    ],
    python_requires=">=3.9",
    install_requires=install_requires,
    extras_require={"dev": dev_requires},
    entry_points={
        "console_scripts": [
            "blazeface=src.main:main",
        ],
    },
)
