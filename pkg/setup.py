from setuptools import setup, find_packages
from shutil import copyfile
import os


def get_long_description():
    this_directory = os.path.abspath(os.path.dirname(__file__))
    with open(os.path.join(this_directory, 'README.md')) as f:
        long_description = f.read()
        return long_description


def copy_docs():
    docs_dir = "simplexbatch/docs"
    if not os.path.exists(docs_dir):
        os.makedirs(docs_dir)

    copyfile("README.md", docs_dir + "/README.md")


copy_docs()
long_description = get_long_description()

setup(
    name="simplexbatch",
    version="0.1.0",
    description="Batch-code services from the simplex code and finite abelian groups.",
    keywords="batch codes simplex code abelian groups combinatorics",
    license="BSD (3-clause)",
    entry_points={"console_scripts": ["simplexbatch=simplexbatch.__main__:main"]},
    packages=find_packages(exclude=["tests"]),
    package_data={"simplexbatch": ["docs/README.md"]},
    include_package_data=True,
    zip_safe=False,
    long_description=long_description,
    long_description_content_type='text/markdown',
    python_requires=">=3.8",
    install_requires=[
        "bitstring",
        "numpy",
        "pandas",
        "sympy",
    ],
    extras_require={"test": ["pytest", "hypothesis"]},
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Mathematics",
        "License :: OSI Approved :: BSD License",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
    ],
)
