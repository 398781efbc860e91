import setuptools

with open("README.md", "r") as fh:
    long_description = fh.read()

setuptools.setup(
    name="protochan",
    version="1.0.0",
    author="Florian Felice",
    author_email="florian.felice@outlook.com",
    description="Protocol channels: encode, simulate and detect covert channels that switch protocols",
    long_description=long_description,
    long_description_content_type="text/markdown",
    url="https://github.com/florianfelice/PROTOCHAN",
    packages=setuptools.find_packages(exclude=["tests", "tests.*", "examples", "examples.*"]),
    install_requires=[
        "pandas>=1.1.0",
        "numpy>=1.17.0",
        "scipy>=1.5.0",
        "tqdm>=4.35.0",
    ],
    extras_require={
        "test": ["pytest>=6.0", "hypothesis>=5.0"],
        "docs": ["sphinx>=3.0", "sphinx_rtd_theme", "sphinx_copybutton"],
    },
    entry_points={
        "console_scripts": ["protochan=protochan.cli:main"],
    },
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
    ],
    python_requires='>=3.7',
)
