import setuptools

with open("README.md", "r") as fh:
    long_description = fh.read()

setuptools.setup(
    name="sfp-multifilters",
    version="0.0.1",
    description="Orthogonal multiwavelet decomposition and PSNR benchmarking of scanned astronomical plates",
    long_description=long_description,
    packages=setuptools.find_packages(exclude=("tests", "scripts", "scripts.*")),
    install_requires=[
        "numpy>=1.21",
        "pandas>=1.2",
        "hydra-core>=1.2",
        "omegaconf>=2.2",
        "tqdm",
        "matplotlib",
    ],
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
    ],
    python_requires='>=3.8',
)
