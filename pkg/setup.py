from setuptools import setup, find_packages

setup(
    name="cqed-gates-sim",
    version="1.0.0",
    packages=find_packages(where="src"),
    package_dir={"": "src"},
    install_requires=[
        "numpy>=1.24.0",
        "scipy>=1.10.0",
        "tqdm>=4.66.0",
        "orjson>=3.9.0",
        "click>=8.1.0",
    ],
    extras_require={
        "test": ["pytest>=7.4.0", "hypothesis>=6.80.0"],
    },
    entry_points={
        "console_scripts": ["cqed-gates=cqed_gates.cli:main"],
    },
    python_requires=">=3.8",
)
