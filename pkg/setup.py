# type: ignore
import pathlib

import setuptools

HERE = pathlib.Path(__file__).parent
README = (HERE / "README.md").read_text()

__version__ = "0.0.0"
exec(open("fracab/version.py").read())  # export __version__


setuptools.setup(
    name="fracab",
    version=__version__,
    description="Two-step Adams-Bashforth solvers for Caputo, Caputo-Fabrizio and "
    "Atangana-Baleanu fractional equations, with a time-fractional Fisher test bench",
    long_description=README,
    long_description_content_type="text/markdown",
    license="MIT",
    packages=["fracab"],
    python_requires=">=3.9",
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Intended Audience :: Developers",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    install_requires=[
        "numpy>=1.24,<2",
        "scipy>=1.10,<2",
        "pydantic>=2.0.2,<3",
        "python-dotenv>=1.0.0,<2",
    ],
    entry_points={"console_scripts": ["fracab=fracab.cli:main"]},
)
