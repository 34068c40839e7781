from setuptools import setup, find_packages

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

setup(
    name="block-ivp-solver",
    version="0.1.0",
    author="Block IVP Solver Team",
    description="Block-implicit collocation solver for initial value problems with a benchmark harness",
    long_description=long_description,
    long_description_content_type="text/markdown",
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    package_dir={"": "src"},
    packages=find_packages(where="src"),
    python_requires=">=3.8",
    install_requires=[
        "numpy>=1.21.0",
        "scipy>=1.7.0",
        "pandas>=1.5.0",    # lineterminator keyword of to_csv
        "colorama>=0.4.6",
        "jsonschema>=4.17.3",
    ],
    extras_require={
        "test": ["pytest>=7.0.0"],
    },
    entry_points={
        "console_scripts": [
            "block-ivp=block_ivp.cli:main",
        ],
    },
)
