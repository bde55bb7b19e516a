import setuptools

with open("README.md", "r") as fh:
    description = fh.read()

setuptools.setup(
    name="acdcguard",
    version="0.1.0",
    description="Frequency attacks and residual detectors for two-area AC/HVDC grids with virtual inertia",
    long_description=description,
    long_description_content_type="text/markdown",
    packages=setuptools.find_packages(exclude=["tests"]),
    license='MIT',
    python_requires='>=3.10',
    install_requires=[
        "numpy>=1.21.0",
        "scipy>=1.8.0",
        "pandas>=1.0.0"
    ],
    extras_require={
        'test': ['pytest>=7.0', 'hypothesis>=6.0']
    },
    entry_points={
        'console_scripts': ['acdcguard=acdcguard.cli:main']
    },
    keywords=['python', 'power systems', 'hvdc', 'false data injection', 'fault detection'],
    classifiers= [
        "Development Status :: 0.1.0",
        "Environment :: Console",
        "Intended Audience :: Science/Research",
        "Programming Language :: Python :: 3",
        "Operating System :: MacOS :: MacOS X",
        "Operating System :: Microsoft :: Windows",
    ]
)
