import re
from pathlib import Path

from setuptools import setup, find_packages

HERE = Path(__file__).resolve().parent

version_re = re.compile(r"^__version__\s*=\s*'(?P<version>.*)'$", re.M)
def version():
    match = version_re.search(Path(HERE, 'bergnorm/__init__.py').read_text())
    if match:
        return match.groupdict()['version'].strip()
    return '0.0.1'

long_description = Path(HERE, 'README.md').resolve().read_text()

setup(
    name='bergnorm',
    packages=find_packages(
        exclude=['tests', 'examples', 'examples.*'],
    ),
    package_dir={
        'bergnorm': 'bergnorm',
    },

    install_requires=[
        'toolz',
        'multipledispatch',
        'pyrsistent',
        'numpy',
        'coloredlogs',
        'ruamel.yaml',
        'click',
    ],
    extras_require={
        'test': ['pytest'],
    },
    python_requires='>=3.8',

    version=version(),
    description=('Numerical norm estimates for the weighted harmonic'
                 ' Bergman projection and related operators on the'
                 ' unit ball'),
    long_description=long_description,
    long_description_content_type='text/markdown',

    license='MIT',

    classifiers=[
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Programming Language :: Python :: 3.8',
        'Topic :: Scientific/Engineering :: Mathematics',
    ],

    zip_safe=False,

    keywords=('harmonic bergman projection besov quadrature hypergeometric'),

    scripts=[
    ],

    entry_points={
        'console_scripts': [
            'bergnorm=bergnorm.cli.main:main',
        ],
    },
)
