#!/usr/bin/env python3

from setuptools import setup

setup(
    name='completedcoh',
    version='1.0.0',
    description='Completed cohomology of towers of finite covers of Delta-complexes',
    long_description='Twisted cellular cochains over Z/p^s for every level of a tower of finite '
                     'p-group covers, certified colimits over the levels, reconstruction of the '
                     'completed groups over Z_p, and structural checks: long exact sequence of '
                     'a pair, excision to the closure of the labels, nilpotent collapse, '
                     'transfer, and Cech comparison',
    packages=['completedcoh'],
    package_data={'completedcoh': ['builtin/*.cfg']},
    install_requires=['sympy>=1.9'],
    extras_require={'test': ['pytest>=7']},
    entry_points={'console_scripts': ['completedcoh=completedcoh.cli_runner:main']},
    classifiers=[
        'Development Status :: 4 - Beta',
        'Intended Audience :: Science/Research',
        'Programming Language :: Python :: 3',
        'Topic :: Scientific/Engineering :: Mathematics',
    ],
    python_requires='>=3.8',
)
