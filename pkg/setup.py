from setuptools import setup, find_packages


install_requires = [
    "jmespath>=1.0.1",
    "termcolor>=2.4.0",
    "python-dateutil>=2.9.0",
    "numpy>=1.22",
    "sympy>=1.12",
]


setup(
    name="ncgraded",
    version="0.1.0",
    license="BSD",
    description="ncgraded computes homological invariants of connected graded algebras.",
    long_description=(
        "ncgraded reads finitely presented connected graded algebras and computes "
        "Groebner bases, Hilbert series, Betti tables, Ext over A and over the "
        "enveloping algebra, and the Artin-Schelter and rigidity verdicts they certify."
    ),
    keywords="noncommutative algebra graded koszul artin-schelter hochschild",
    packages=find_packages(exclude=["tests"]),
    package_data={"ncgraded": ["corpus/*.alg"]},
    platforms="any",
    python_requires=">=3.9",
    install_requires=install_requires,
    test_suite="tests",
    classifiers=[
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3 :: Only",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
        "Development Status :: 3 - Alpha",
        "Environment :: Console",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: BSD License",
        "Operating System :: OS Independent",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    entry_points={
        "console_scripts": [
            "ncgraded = ncgraded.bin:main",
        ]
    },
    zip_safe=False,
)
